// Copyright 2026 The qmcs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qmcs: experiment runner over the library. Every subcommand writes one JSON
// document (CSV for `model` and `bench`) to stdout or --out.
//
// Exit codes: 0 ok, 1 invalid configuration, 2 I/O error, 3 contract
// violation.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qmcs/io.hpp"
#include "qmcs/qmcs.hpp"
#include "qmcs_validation.hpp"

namespace {

using nlohmann::json;
using namespace qmcs;

constexpr int kSchema = 1;

json beta_json(double b) {
    if (std::isinf(b)) {
        return b > 0 ? "inf" : "-inf";
    }
    return b;
}

double parse_beta(const std::string &s) {
    if (s == "inf" || s == "infinity") {
        return kInfinity;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    require(used == s.size() && !s.empty(), "cannot parse beta '" + s + "'");
    return v;
}

std::string csv_number(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

struct Common {
    std::uint64_t seed = 1;
    double C = kDefaultC;
    double c_r = 1.0;
    double c_s = 1.0;
    std::string out;
};

EstimatorConstants constants_of(const Common &c) {
    return EstimatorConstants::with_C(c.C);
}

json constants_json(const Common &c) {
    const auto k = constants_of(c);
    return {{"C", k.C}, {"D", k.D}, {"c_r", c.c_r}, {"c_s", c.c_s}};
}

json header(const std::string &command, const Common &c) {
    return {{"schema", kSchema}, {"command", command}, {"seed", c.seed}, {"constants", constants_json(c)}};
}

json estimate_json(const Estimate &e) {
    return {{"value", e.value},
            {"target_error", e.target_error},
            {"error_kind", to_string(e.error_kind)},
            {"confidence", e.confidence},
            {"ledger", io::to_json(e.ledger)}};
}

void emit(const std::string &text, const Common &c) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out);
    if (!f) {
        throw IoError("cannot write " + c.out);
    }
    f << text;
}

void emit(const json &j, const Common &c) {
    emit(j.dump(2) + "\n", c);
}

struct ModelArgs {
    std::string model = "ising";
    std::string graph;
    int k = 3;
};

GibbsModel load_model(const ModelArgs &a) {
    require(!a.graph.empty(), "--graph is required");
    const auto g = io::load_graph(a.graph);
    if (a.model == "ising") {
        return ising_model(g);
    }
    if (a.model == "colouring" || a.model == "coloring") {
        return colouring_model(g, a.k);
    }
    if (a.model == "matching") {
        return matching_model(g);
    }
    throw std::invalid_argument("unknown model '" + a.model + "'");
}

void add_common(CLI::App *app, Common &c, bool seeded = true) {
    if (seeded) {
        app->add_option("--seed", c.seed, "RNG seed");
    }
    app->add_option("--C", c.C, "Amplitude-estimation bound constant C (D = max(4C, 10))");
    app->add_option("--c_r", c.c_r, "Reflection cost constant");
    app->add_option("--c_s", c.c_s, "Warm-start cost constant");
    app->add_option("--out", c.out, "Write output here instead of stdout");
}

void add_model(CLI::App *app, ModelArgs &m) {
    app->add_option("--model", m.model, "ising, colouring or matching")
        ->check(CLI::IsMember({"ising", "colouring", "coloring", "matching"}));
    app->add_option("--graph", m.graph, "Graph file: \"n m\" then m lines \"u v\"")->required();
    app->add_option("--k", m.k, "Number of colours");
}

Direction parse_direction(const std::string &s, const GibbsModel &m) {
    if (s == "forward") {
        return Direction::forward;
    }
    if (s == "reversed") {
        return Direction::reversed;
    }
    require(s == "auto", "direction must be forward, reversed or auto");
    return m.kind == ModelKind::matching ? Direction::reversed : Direction::forward;
}

PartitionMode parse_mode(const std::string &s) {
    if (s == "ideal_sampling") {
        return PartitionMode::ideal_sampling;
    }
    if (s == "walk_idealized") {
        return PartitionMode::walk_idealized;
    }
    require(s == "walk_exact_sim", "unknown mode '" + s + "'");
    return PartitionMode::walk_exact_sim;
}

json schedule_json(const CoolingSchedule &s) {
    json betas = json::array();
    for (double b : s.betas) {
        betas.push_back(beta_json(b));
    }
    return {{"betas", betas}, {"B", s.B}, {"direction", to_string(s.direction)}, {"ell", s.ell()}};
}

// mean ----------------------------------------------------------------------

struct MeanArgs {
    Common common;
    std::string dist;
    std::string method = "bounded";
    double eps = 0.01;
    double delta = 0.1;
    double sigma = 1.0;
    double B = 2.0;
};

Estimate run_mean(const ValueDistribution &d, const MeanArgs &a, Rng &rng, QueryLedger &ledger) {
    const auto k = constants_of(a.common);
    if (a.method == "bounded") {
        return estimate_mean_bounded(d, iterations_for_accuracy(a.eps, k.C), a.delta, rng, ledger, k);
    }
    if (a.method == "l2") {
        return estimate_mean_l2(d, a.eps, rng, ledger, k);
    }
    if (a.method == "variance") {
        return estimate_mean_variance(d, a.sigma, a.eps, rng, ledger, k);
    }
    if (a.method == "relative") {
        return estimate_mean_relative(d, a.B, a.eps, rng, ledger, k);
    }
    if (a.method == "chebyshev") {
        return classical_mean_chebyshev(d, a.sigma, a.eps, a.delta, rng, ledger);
    }
    throw std::invalid_argument("unknown method '" + a.method + "'");
}

void cmd_mean(const MeanArgs &a) {
    const auto d = io::load_distribution(a.dist);
    Rng rng(a.common.seed);
    QueryLedger ledger;
    const auto e = run_mean(d, a, rng, ledger);
    json j = header("mean", a.common);
    j["method"] = a.method;
    j["params"] = {{"eps", a.eps}, {"delta", a.delta}, {"sigma", a.sigma}, {"B", a.B}};
    j["exact_mean"] = d.mean();
    j["estimate"] = estimate_json(e);
    j["ledger"] = io::to_json(ledger);
    emit(j, a.common);
}

// ae-check ------------------------------------------------------------------

struct AeArgs {
    Common common;
    double a = 0.3;
    std::int64_t t = 64;
};

void cmd_ae_check(const AeArgs &a) {
    require(a.a >= 0.0 && a.a <= 1.0 && a.t >= 1, "ae-check: need a in [0, 1] and t >= 1");
    const double radius = theorem1_radius(a.a, a.t);
    json j = header("ae-check", a.common);
    j.erase("seed");
    j["a"] = a.a;
    j["t"] = a.t;
    j["bound"] = radius;
    j["coverage"] = kernel_coverage(a.a, a.t, radius);
    j["coverage_target"] = 8.0 / (kPi * kPi);
    if (a.t <= 256) {
        j["circuit_tv"] = tv_distance(ae_outcome_distribution(a.a, a.t), ae_circuit_distribution(a.a, a.t));
    }
    emit(j, a.common);
}

// model / chain / walk-check / schedule -------------------------------------

struct ModelCmdArgs {
    Common common;
    ModelArgs model;
    std::string betas = "0,0.5,1,2,inf";
    double beta = 1.0;
    double B = 2.0;
    std::string direction = "auto";
};

void cmd_model(const ModelCmdArgs &a) {
    const auto m = load_model(a.model);
    std::ostringstream out;
    out << "beta,Z,states,ground_states\n";
    std::stringstream ss(a.betas);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double b = parse_beta(item);
        out << csv_number(b) << ',' << csv_number(exact_partition(m, b)) << ',' << m.size() << ','
            << csv_number(m.energy_counts.front()) << '\n';
    }
    emit(out.str(), a.common);
}

json chain_summary(const MarkovChain &c) {
    const auto st = stationarity(c);
    const auto sp = chain_spectrum(c);
    return {{"states", c.size()},
            {"tau", sp.tau},
            {"lambda1", sp.lambda1},
            {"eigenvalues", sp.eigenvalues},
            {"row_sum_residual", st.row_sum_residual},
            {"stationarity_residual", st.stationarity_residual},
            {"reversibility_residual", st.reversibility_residual}};
}

void cmd_chain(const ModelCmdArgs &a) {
    const auto m = load_model(a.model);
    const auto c = model_chain(m, a.beta);
    json j = header("chain", a.common);
    j.erase("seed");
    j["model"] = m.name();
    j["beta"] = beta_json(a.beta);
    j["chain"] = chain_summary(c);
    emit(j, a.common);
}

void cmd_walk_check(const ModelCmdArgs &a) {
    const auto m = load_model(a.model);
    const auto c = model_chain(m, a.beta);
    const auto w = szegedy_walk(c);
    json j = header("walk-check", a.common);
    j.erase("seed");
    j["model"] = m.name();
    j["beta"] = beta_json(a.beta);
    j["discriminant_spectrum"] = chain_spectrum(c).eigenvalues;
    j["eigenphases"] = w.eigenphases();
    j["phase_gap_turns"] = phase_gap_turns(c);
    j["unitarity_residual"] = w.unitarity_residual();
    j["spectral_mismatch"] = validation::spectral_mismatch(c);
    emit(j, a.common);
}

void cmd_schedule(const ModelCmdArgs &a) {
    const auto m = load_model(a.model);
    const auto s = build_schedule(m, a.B, parse_direction(a.direction, m));
    const auto rep = verify_schedule(m, s);
    json pairs = json::array();
    for (const auto &p : rep.pairs) {
        pairs.push_back({{"beta_i", beta_json(p.beta_i)},
                         {"beta_j", beta_json(p.beta_j)},
                         {"ratio", p.ratio},
                         {"chi2", p.chi2_definitional},
                         {"overlap_squared", p.overlap_squared},
                         {"passes", p.passes}});
    }
    json j = header("schedule", a.common);
    j.erase("seed");
    j["model"] = m.name();
    j["schedule"] = schedule_json(s);
    j["verified"] = rep.all_pass;
    j["pairs"] = pairs;
    emit(j, a.common);
    if (!rep.all_pass) {
        throw ContractViolation("schedule fails verification");
    }
}

// partition ------------------------------------------------------------------

struct PartitionArgs {
    Common common;
    ModelArgs model;
    double B = 2.0;
    double eps = 0.1;
    double delta = 0.25;
    std::string mode = "walk_idealized";
    std::string direction = "auto";
    bool baseline = false;
};

json partition_json(const PartitionEstimate &e) {
    json diags = json::array();
    for (const auto &d : e.diagnostics) {
        diags.push_back({{"beta_i", beta_json(d.beta_i)},
                         {"beta_j", beta_json(d.beta_j)},
                         {"estimate", d.estimate},
                         {"exact", d.exact},
                         {"sample_beta", beta_json(d.sample_beta)},
                         {"corrupted_runs", d.corrupted_runs},
                         {"ledger", io::to_json(d.ledger)}});
    }
    return {{"z_value", e.z_value},
            {"anchor", e.anchor},
            {"target_beta", beta_json(e.target_beta)},
            {"epsilon", e.epsilon},
            {"delta", e.delta},
            {"ratios", e.ratios},
            {"diagnostics", diags},
            {"ledger", io::to_json(e.ledger)}};
}

void cmd_partition(const PartitionArgs &a) {
    const auto m = load_model(a.model);
    const auto s = build_schedule(m, a.B, parse_direction(a.direction, m));
    PartitionOptions opt;
    opt.constants = constants_of(a.common);
    opt.c_r = a.common.c_r;
    opt.c_s = a.common.c_s;
    Rng rng(a.common.seed);
    QueryLedger ledger;
    json j = header("partition", a.common);
    j["model"] = m.name();
    j["schedule"] = schedule_json(s);
    if (a.baseline) {
        j["mode"] = "classical_baseline";
        j["estimate"] = partition_json(classical_baseline(m, s, a.eps, rng, ledger));
    } else {
        const auto mode = parse_mode(a.mode);
        j["mode"] = to_string(mode);
        j["walk_failure"] = opt.walk_failure;
        j["estimate"] = partition_json(estimate_partition(m, s, a.eps, a.delta, mode, rng, ledger, opt));
    }
    j["exact_z"] = exact_partition(m, s.direction == Direction::forward ? kInfinity : 0.0);
    emit(j, a.common);
}

// tvd ------------------------------------------------------------------------

struct TvdArgs {
    Common common;
    std::string p;
    std::string q;
    double eps = 0.1;
    double delta = 0.1;
};

void cmd_tvd(const TvdArgs &a) {
    auto p = io::load_probability_vector(a.p);
    auto q = io::load_probability_vector(a.q);
    const std::size_t n = std::max(p.size(), q.size());
    p.resize(n, 0.0);
    q.resize(n, 0.0);
    Rng rng(a.common.seed);
    QueryLedger ledger;
    const auto e = estimate_tvd(p, q, a.eps, a.delta, rng, ledger, constants_of(a.common));
    json j = header("tvd", a.common);
    j["params"] = {{"eps", a.eps}, {"delta", a.delta}, {"n", n}};
    j["exact_tvd"] = exact_tvd(p, q);
    j["estimate"] = estimate_json(e.estimate);
    j["t_inner"] = e.t_inner;
    j["reps_inner"] = e.reps_inner;
    j["t_outer"] = e.t_outer;
    j["subroutine_mean"] = e.subroutine_mean;
    j["ae_iterations"] = e.ae_iterations;
    emit(j, a.common);
}

// bench ----------------------------------------------------------------------

struct BenchArgs {
    MeanArgs mean;
    std::string sweep = "eps=0.1,0.05,0.02,0.01";
    std::size_t trials = 20;
};

void cmd_bench(const BenchArgs &a) {
    const std::string prefix = "eps=";
    require(a.sweep.rfind(prefix, 0) == 0, "bench: --sweep must look like eps=0.1,0.05");
    std::vector<double> eps;
    std::stringstream ss(a.sweep.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ',')) {
        eps.push_back(parse_beta(item));
    }
    require(!eps.empty(), "bench: empty sweep");
    const auto d = a.mean.dist.empty() ? ValueDistribution::from_pairs({{4.0, 0.25}, {5.0, 0.5}, {6.0, 0.25}})
                                       : io::load_distribution(a.mean.dist);
    const double mu = d.mean();
    std::ostringstream out;
    out << "# schema=" << kSchema << " method=" << a.mean.method << " trials=" << a.trials
        << " C=" << csv_number(constants_of(a.mean.common).C) << " D=" << csv_number(constants_of(a.mean.common).D)
        << " c_r=" << csv_number(a.mean.common.c_r) << " c_s=" << csv_number(a.mean.common.c_s) << '\n';
    out << "eps,reflections,classical_samples,error\n";
    for (std::size_t k = 0; k < eps.size(); ++k) {
        MeanArgs m = a.mean;
        m.eps = eps[k];
        QueryLedger total;
        const auto errors = run_trials<double>(
            trial_seed(a.mean.common.seed, k), a.trials,
            [&](std::size_t, Rng &rng, QueryLedger &l) { return std::abs(run_mean(d, m, rng, l).value - mu); },
            &total);
        double err = 0.0;
        for (double e : errors) {
            err += e;
        }
        out << csv_number(eps[k]) << ','
            << csv_number(static_cast<double>(total.reflection_uses) / static_cast<double>(a.trials)) << ','
            << chebyshev_samples(a.mean.sigma, eps[k], 1.0 / 3.0) << ','
            << csv_number(err / static_cast<double>(a.trials)) << '\n';
    }
    emit(out.str(), a.mean.common);
}

// validate -------------------------------------------------------------------

struct ValidateArgs {
    Common common;
    std::string data = QMCS_DEFAULT_DATA_DIR;
    std::vector<int> only;
};

int cmd_validate(const ValidateArgs &a) {
    validation::Options opt;
    opt.constants = constants_of(a.common);
    opt.seed = a.common.seed;
    opt.data_dir = a.data;
    std::error_code ec;
    opt.cli_path = std::filesystem::read_symlink("/proc/self/exe", ec).string();
    const auto all = validation::criteria();
    json rows = json::array();
    bool ok = true;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!a.only.empty() && std::find(a.only.begin(), a.only.end(), id) == a.only.end()) {
            continue;
        }
        const auto r = validation::run_criterion(all[i], id, opt);
        std::cerr << validation::format_line(r) << '\n';
        ok = ok && r.passed;
        rows.push_back({{"id", r.id},
                        {"name", r.name},
                        {"passed", r.passed},
                        {"runtime_seconds", r.seconds},
                        {"time_limit_seconds", r.time_limit},
                        {"detail", r.detail}});
    }
    json j = header("validate", a.common);
    j["criteria"] = rows;
    j["all_passed"] = ok;
    emit(j, a.common);
    return ok ? 0 : 3;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"qmcs: quantum Monte Carlo estimation experiments"};
    app.require_subcommand(1);

    MeanArgs mean;
    auto *c_mean = app.add_subcommand("mean", "Estimate the mean of a distribution");
    add_common(c_mean, mean.common);
    c_mean->add_option("--dist", mean.dist, "Distribution JSON")->required();
    c_mean->add_option("--method", mean.method, "bounded, l2, variance, relative or chebyshev")
        ->check(CLI::IsMember({"bounded", "l2", "variance", "relative", "chebyshev"}));
    c_mean->add_option("--eps", mean.eps, "Target accuracy");
    c_mean->add_option("--delta", mean.delta, "Failure probability (bounded, chebyshev)");
    c_mean->add_option("--sigma", mean.sigma, "Standard deviation bound (variance, chebyshev)");
    c_mean->add_option("--B", mean.B, "Second-moment ratio bound (relative)");

    AeArgs ae;
    auto *c_ae = app.add_subcommand("ae-check", "Exact coverage of one amplitude-estimation shot");
    add_common(c_ae, ae.common, false);
    c_ae->add_option("--a", ae.a, "Amplitude in [0, 1]");
    c_ae->add_option("--t", ae.t, "Grover iterations");

    ModelCmdArgs model;
    auto *c_model = app.add_subcommand("model", "Exact partition functions as CSV");
    add_common(c_model, model.common, false);
    add_model(c_model, model.model);
    c_model->add_option("--betas", model.betas, "Comma-separated inverse temperatures (inf allowed)");

    ModelCmdArgs chain;
    auto *c_chain = app.add_subcommand("chain", "Relaxation time and stationarity residuals");
    add_common(c_chain, chain.common, false);
    add_model(c_chain, chain.model);
    c_chain->add_option("--beta", chain.beta, "Inverse temperature");

    ModelCmdArgs walk;
    auto *c_walk = app.add_subcommand("walk-check", "Walk operator spectrum and phase gap");
    add_common(c_walk, walk.common, false);
    add_model(c_walk, walk.model);
    c_walk->add_option("--beta", walk.beta, "Inverse temperature");

    ModelCmdArgs sched;
    auto *c_sched = app.add_subcommand("schedule", "Build and verify a cooling schedule");
    add_common(c_sched, sched.common, false);
    add_model(c_sched, sched.model);
    c_sched->add_option("--B", sched.B, "Chebyshev constant");
    c_sched->add_option("--direction", sched.direction, "forward, reversed or auto");

    PartitionArgs part;
    auto *c_part = app.add_subcommand("partition", "Estimate a partition function");
    add_common(c_part, part.common);
    add_model(c_part, part.model);
    c_part->add_option("--B", part.B, "Chebyshev constant");
    c_part->add_option("--eps", part.eps, "Relative accuracy");
    c_part->add_option("--delta", part.delta, "Failure probability");
    c_part->add_option("--mode", part.mode, "ideal_sampling, walk_idealized or walk_exact_sim");
    c_part->add_option("--direction", part.direction, "forward, reversed or auto");
    c_part->add_flag("--baseline", part.baseline, "Run the classical product estimator instead");

    TvdArgs tvd;
    auto *c_tvd = app.add_subcommand("tvd", "Estimate total variation distance");
    add_common(c_tvd, tvd.common);
    c_tvd->add_option("--p", tvd.p, "First distribution (JSON)")->required();
    c_tvd->add_option("--q", tvd.q, "Second distribution (JSON)")->required();
    c_tvd->add_option("--eps", tvd.eps, "Additive accuracy");
    c_tvd->add_option("--delta", tvd.delta, "Failure probability");

    BenchArgs bench;
    bench.mean.method = "variance";
    auto *c_bench = app.add_subcommand("bench", "Cost and error sweep as CSV");
    add_common(c_bench, bench.mean.common);
    c_bench->add_option("--sweep", bench.sweep, "eps=<list>");
    c_bench->add_option("--method", bench.mean.method, "bounded, l2, variance, relative or chebyshev")
        ->check(CLI::IsMember({"bounded", "l2", "variance", "relative", "chebyshev"}));
    c_bench->add_option("--dist", bench.mean.dist, "Distribution JSON (default {4:1/4, 5:1/2, 6:1/4})");
    c_bench->add_option("--sigma", bench.mean.sigma, "Standard deviation bound");
    c_bench->add_option("--B", bench.mean.B, "Second-moment ratio bound");
    c_bench->add_option("--delta", bench.mean.delta, "Failure probability");
    c_bench->add_option("--trials", bench.trials, "Trials per sweep point")->check(CLI::PositiveNumber);

    ValidateArgs val;
    auto *c_val = app.add_subcommand("validate", "Run the acceptance criteria");
    add_common(c_val, val.common);
    c_val->add_option("--data", val.data, "Sample input directory");
    c_val->add_option("--only", val.only, "Run only these criteria");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_mean->parsed()) {
            cmd_mean(mean);
        } else if (c_ae->parsed()) {
            cmd_ae_check(ae);
        } else if (c_model->parsed()) {
            cmd_model(model);
        } else if (c_chain->parsed()) {
            cmd_chain(chain);
        } else if (c_walk->parsed()) {
            cmd_walk_check(walk);
        } else if (c_sched->parsed()) {
            cmd_schedule(sched);
        } else if (c_part->parsed()) {
            cmd_partition(part);
        } else if (c_tvd->parsed()) {
            cmd_tvd(tvd);
        } else if (c_bench->parsed()) {
            cmd_bench(bench);
        } else if (c_val->parsed()) {
            return cmd_validate(val);
        }
    } catch (const IoError &e) {
        std::cerr << "qmcs: " << e.what() << '\n';
        return 2;
    } catch (const ContractViolation &e) {
        std::cerr << "qmcs: contract violation: " << e.what() << '\n';
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "qmcs: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
