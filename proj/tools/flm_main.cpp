#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "flm/json_io.hpp"
#include "flm/oracle.hpp"
#include "flm/pipeline.hpp"
#include "flm/rng.hpp"

using namespace flm;

namespace {

// exit-code contract: 0 ok, 1 verification failure, 2 precondition, 3 capability
int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::capability: return 3;
        default: return 2;
    }
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
    }
}

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

struct GenerateOptions {
    std::string fixture_name;
    std::string from_ufl;
    bool euclidean = false;
    int nf = 3, nc = 8;
    double p = 0.5, box = 10.0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_generate(const GenerateOptions& opt) {
    int sources = (!opt.fixture_name.empty()) + (!opt.from_ufl.empty()) + opt.euclidean;
    if (sources != 1) {
        std::cerr << "generate: choose exactly one of --fixture, --from-ufl, --euclidean\n";
        return 2;
    }
    FlmInstance inst;
    if (!opt.fixture_name.empty())
        inst = fixture(opt.fixture_name);
    else if (!opt.from_ufl.empty())
        inst = reduce_ufl_to_flm(load_ufl(opt.from_ufl));
    else
        inst = generate_euclidean(opt.nf, opt.nc, opt.p, opt.box, opt.seed);
    emit(instance_to_json(inst), opt.out);
    return 0;
}

struct SolveOptions {
    std::string instance_path;
    std::string mode = "auto";
    double lambda = 0.0;
    std::uint64_t seed = 0;
    int trials = 1;
    bool dump_lp = false;
};

int cmd_solve(const SolveOptions& opt) {
    FlmInstance inst = load_instance(opt.instance_path);
    {
        auto violations = validate_instance(inst);
        if (!violations.empty())
            throw precondition_error("instance invalid: " + violations.front());
    }
    if (opt.mode == "exact") {
        ExactResult res = exact_solve(inst);
        std::cout << exact_result_to_json(inst, res);
        return 0;
    }
    if (opt.mode == "lp-only") {
        LpFlmResult lp = solve_lp_flm(inst);
        std::ostringstream os;
        os << "{\n  \"mode\": \"lp-only\",\n  \"nu\": " << lp.nu << ",\n  \"lp_value\": "
           << lp.value << ",\n  \"lp_open\": " << lp.open_cost << ",\n  \"lp_conn\": "
           << lp.conn_cost << ",\n  \"cuts\": " << lp.cuts_added << "\n}\n";
        std::cout << os.str();
        return 0;
    }
    PipelineConfig cfg;
    cfg.mode = mode_from_name(opt.mode);
    cfg.lambda = opt.lambda;
    cfg.seed = opt.seed;
    cfg.trials = opt.trials;
    PipelineReport rep = solve_flm(inst, cfg);
    std::cout << report_to_json(inst, rep);
    return 0;
}

struct VerifyOptions {
    std::string instance_path;
    std::string solution_path;
};

int cmd_verify(const VerifyOptions& opt) {
    FlmInstance inst = load_instance(opt.instance_path);
    std::vector<std::string> violations = validate_instance(inst);
    FlmSolution sol;
    if (violations.empty()) {
        sol = load_solution(inst, opt.solution_path);
        for (const auto& v : validate_solution(inst, sol)) violations.push_back(v);
    }
    if (violations.empty()) {
        CostBreakdown cb = solution_cost(inst, sol);
        auto close = [](double a, double b) { return std::abs(a - b) <= 1e-6; };
        if (sol.opening_cost_total != 0.0 || sol.connection_cost_total != 0.0) {
            if (!close(cb.opening, sol.opening_cost_total))
                violations.push_back("stored opening cost differs from recomputation");
            if (!close(cb.connection, sol.connection_cost_total))
                violations.push_back("stored connection cost differs from recomputation");
        }
    }
    std::ostringstream os;
    os << "{\n  \"violations\": [";
    for (std::size_t i = 0; i < violations.size(); ++i) {
        os << (i ? "," : "") << "\n    \"" << violations[i] << "\"";
    }
    os << (violations.empty() ? "]" : "\n  ]") << "\n}\n";
    std::cout << os.str();
    return violations.empty() ? 0 : 1;
}

struct BenchOptions {
    std::string preset;
    std::vector<int> nf{3};
    std::vector<int> nc{8};
    std::vector<double> p{0.5};
    double box = 10.0;
    int count = 5;
    std::string modes = "general,auto";
    double lambda = 0.0;
    std::uint64_t seed = 0;
    int trials = 1;
    int jobs = 1;
    std::string out;
};

struct BenchTask {
    std::string name;
    FlmInstance inst;
    std::string mode;
    std::uint64_t run_seed;
};

std::string csv_num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

int cmd_bench(BenchOptions opt) {
    if (opt.preset == "desk") {
        opt.nf = {2, 3, 4};
        opt.nc = {6, 8};
        opt.p = {0.5, 1.0};
        opt.count = 25;
        opt.modes = "general,auto";
    } else if (!opt.preset.empty()) {
        std::cerr << "unknown preset '" << opt.preset << "'\n";
        return 2;
    }

    std::vector<std::string> modes;
    {
        std::stringstream ss(opt.modes);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) modes.push_back(item);
    }

    std::vector<BenchTask> tasks;
    Rng seeder(opt.seed);
    int instance_index = 0;
    for (int nf : opt.nf)
        for (int nc : opt.nc)
            for (double p : opt.p)
                for (int rep = 0; rep < opt.count; ++rep) {
                    std::uint64_t inst_seed = seeder.split(instance_index).next_u64();
                    FlmInstance inst = generate_euclidean(nf, nc, p, opt.box, inst_seed);
                    std::ostringstream name;
                    name << "rand-nf" << nf << "-nc" << nc << "-p" << p << "-i" << instance_index;
                    for (const auto& mode : modes)
                        tasks.push_back({name.str(), inst, mode,
                                         seeder.split(instance_index).next_u64()});
                    ++instance_index;
                }

    std::vector<std::string> rows(tasks.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t t = cursor.fetch_add(1);
            if (t >= tasks.size()) return;
            const BenchTask& task = tasks[t];
            std::ostringstream row;
            row << task.name << "," << task.mode << ",";
            try {
                PipelineConfig cfg;
                cfg.mode = mode_from_name(task.mode);
                cfg.lambda = opt.lambda;
                cfg.seed = task.run_seed;
                cfg.trials = opt.trials;
                double t0 = now_ms();
                PipelineReport rep = solve_flm(task.inst, cfg);
                double total_ms = now_ms() - t0;
                (void)total_ms;

                bool have_exact = task.inst.n_facilities <= 10;
                double exact = 0.0;
                if (have_exact) exact = exact_solve(task.inst).optimum;

                double cost = rep.solution.total();
                row << csv_num(rep.lambda) << "," << task.run_seed << "," << rep.nu << ","
                    << csv_num(rep.lp_value) << "," << csv_num(cost) << ",";
                row << (have_exact ? csv_num(exact) : "") << ",";
                row << (rep.lp_value > 1e-12 ? csv_num(cost / rep.lp_value)
                                             : (cost <= 1e-12 ? "1" : "")) << ",";
                if (have_exact && exact > 1e-12)
                    row << csv_num(cost / exact);
                else if (have_exact && cost <= 1e-12)
                    row << "1";
                row << "," << rep.cuts << "," << (rep.reroute ? rep.reroute->iterations : 0) << ","
                    << csv_num(rep.ms_lp) << "," << csv_num(rep.ms_round) << ",ok";
            } catch (const Error& e) {
                const char* kind = e.kind() == ErrorKind::capability ? "capability"
                                   : e.kind() == ErrorKind::precondition ? "precondition"
                                                                         : "error";
                row << ",,,,,,,,,,," << "error:" << kind;
            }
            rows[t] = row.str();
        }
    };

    int jobs = std::max(1, opt.jobs);
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ostringstream csv;
    csv << "instance,mode,lambda,seed,nu,lp_value,cost,exact,ratio_lp,ratio_exact,cuts,"
           "reroute_iters,ms_lp,ms_round,status\n";
    for (const auto& r : rows) csv << r << "\n";
    emit(csv.str(), opt.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Facility location with matching: generators, solvers, verification, benchmarks"};
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "write an instance JSON");
    generate->add_option("--fixture", gen.fixture_name, "named fixture (gap-2fac, colocated-unit, triangle-3-2)");
    generate->add_option("--from-ufl", gen.from_ufl, "UFL JSON file to reduce");
    generate->add_flag("--euclidean", gen.euclidean, "random points in a square");
    generate->add_option("--nf", gen.nf, "facilities");
    generate->add_option("--nc", gen.nc, "clients");
    generate->add_option("--p", gen.p, "edge probability");
    generate->add_option("--box", gen.box, "square side length");
    generate->add_option("--seed", gen.seed, "generator seed");
    generate->add_option("-o,--out", gen.out, "output path (default stdout)");

    SolveOptions sol;
    auto* solve = app.add_subcommand("solve", "solve an instance, report JSON on stdout");
    solve->add_option("instance", sol.instance_path, "instance JSON")->required();
    solve->add_option("--mode", sol.mode,
                      "general|perfect-reroute|perfect-direct|auto|lp-only|exact");
    solve->add_option("--lambda", sol.lambda, "rounding scale (default per mode)");
    solve->add_option("--seed", sol.seed, "rounding seed");
    solve->add_option("--trials", sol.trials, "rounding repetitions, best kept");

    VerifyOptions ver;
    auto* verify = app.add_subcommand("verify", "check instance and solution files");
    verify->add_option("instance", ver.instance_path, "instance JSON")->required();
    verify->add_option("solution", ver.solution_path, "solution JSON")->required();

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "seeded sweep, CSV of run records");
    bench_cmd->add_option("--preset", bench.preset, "named sweep (desk)");
    bench_cmd->add_option("--nf", bench.nf, "facility counts");
    bench_cmd->add_option("--nc", bench.nc, "client counts");
    bench_cmd->add_option("--p", bench.p, "edge probabilities");
    bench_cmd->add_option("--box", bench.box, "square side length");
    bench_cmd->add_option("--count", bench.count, "instances per parameter cell");
    bench_cmd->add_option("--modes", bench.modes, "comma separated mode list");
    bench_cmd->add_option("--lambda", bench.lambda, "override lambda");
    bench_cmd->add_option("--seed", bench.seed, "sweep seed");
    bench_cmd->add_option("--trials", bench.trials, "rounding repetitions per run");
    bench_cmd->add_option("--jobs", bench.jobs, "parallel workers");
    bench_cmd->add_option("-o,--out", bench.out, "output CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(gen);
        if (solve->parsed()) return cmd_solve(sol);
        if (verify->parsed()) return cmd_verify(ver);
        if (bench_cmd->parsed()) return cmd_bench(bench);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
