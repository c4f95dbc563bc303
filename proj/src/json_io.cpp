#include "flm/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace flm {

using json = nlohmann::ordered_json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << content;
}

std::string instance_to_json(const FlmInstance& inst) {
    json facilities = json::array();
    for (int i = 0; i < inst.n_facilities; ++i) {
        json f;
        f["id"] = i;
        if (!inst.facility_labels[i].empty()) f["label"] = inst.facility_labels[i];
        f["opening_cost"] = inst.opening_cost[i];
        facilities.push_back(f);
    }
    json clients = json::array();
    for (int j = 0; j < inst.n_clients; ++j) {
        json c;
        c["id"] = j;
        if (!inst.client_labels[j].empty()) c["label"] = inst.client_labels[j];
        clients.push_back(c);
    }
    json metric = json::array();
    const int n = inst.n_points();
    for (int a = 0; a < n; ++a) {
        json row = json::array();
        for (int b = 0; b < n; ++b) row.push_back(inst.d(a, b));
        metric.push_back(row);
    }
    json edges = json::array();
    for (const auto& [j, k] : inst.compat.edges) edges.push_back(json::array({j, k}));

    json doc;
    doc["facilities"] = facilities;
    doc["clients"] = clients;
    doc["metric"] = metric;
    doc["edges"] = edges;
    return doc.dump(2) + "\n";
}

FlmInstance instance_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& ex) {
        throw io_error(std::string("invalid instance JSON: ") + ex.what());
    }
    FlmInstance inst;
    try {
        const auto& facilities = doc.at("facilities");
        const auto& clients = doc.at("clients");
        inst.n_facilities = (int)facilities.size();
        inst.n_clients = (int)clients.size();
        inst.facility_labels.resize(inst.n_facilities);
        inst.client_labels.resize(inst.n_clients);
        inst.opening_cost.resize(inst.n_facilities);
        for (int i = 0; i < inst.n_facilities; ++i) {
            const auto& f = facilities[i];
            if (f.at("id").get<int>() != i)
                throw io_error("facility ids must be dense 0-based in order");
            inst.opening_cost[i] = f.at("opening_cost").get<double>();
            if (f.contains("label")) inst.facility_labels[i] = f["label"].get<std::string>();
        }
        for (int j = 0; j < inst.n_clients; ++j) {
            const auto& c = clients[j];
            if (c.at("id").get<int>() != j)
                throw io_error("client ids must be dense 0-based in order");
            if (c.contains("label")) inst.client_labels[j] = c["label"].get<std::string>();
        }
        const int n = inst.n_points();
        const auto& metric = doc.at("metric");
        if ((int)metric.size() != n) throw io_error("metric row count mismatch");
        inst.metric.assign((std::size_t)n * n, 0.0);
        for (int a = 0; a < n; ++a) {
            if ((int)metric[a].size() != n) throw io_error("metric column count mismatch");
            for (int b = 0; b < n; ++b)
                inst.metric[(std::size_t)a * n + b] = metric[a][b].get<double>();
        }
        std::vector<Edge> edges;
        for (const auto& e : doc.at("edges")) {
            if (e.size() != 2) throw io_error("edge entries must be pairs");
            edges.push_back(make_edge(e[0].get<int>(), e[1].get<int>()));
        }
        inst.compat = Graph(inst.n_clients, edges);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& ex) {
        throw io_error(std::string("invalid instance JSON: ") + ex.what());
    }
    return inst;
}

FlmInstance load_instance(const std::string& path) {
    return instance_from_json(read_text_file(path));
}

void save_instance(const FlmInstance& inst, const std::string& path) {
    write_text_file(path, instance_to_json(inst));
}

UflInstance ufl_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& ex) {
        throw io_error(std::string("invalid UFL JSON: ") + ex.what());
    }
    UflInstance ufl;
    try {
        ufl.n_facilities = (int)doc.at("facilities").size();
        ufl.n_clients = (int)doc.at("clients").size();
        ufl.opening_cost.resize(ufl.n_facilities);
        for (int i = 0; i < ufl.n_facilities; ++i)
            ufl.opening_cost[i] = doc["facilities"][i].at("opening_cost").get<double>();
        const auto& rows = doc.at("assignment_cost");
        if ((int)rows.size() != ufl.n_facilities) throw io_error("assignment cost row mismatch");
        ufl.assignment.assign((std::size_t)ufl.n_facilities * ufl.n_clients, 0.0);
        for (int i = 0; i < ufl.n_facilities; ++i) {
            if ((int)rows[i].size() != ufl.n_clients)
                throw io_error("assignment cost column mismatch");
            for (int j = 0; j < ufl.n_clients; ++j) ufl.cost(i, j) = rows[i][j].get<double>();
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& ex) {
        throw io_error(std::string("invalid UFL JSON: ") + ex.what());
    }
    return ufl;
}

UflInstance load_ufl(const std::string& path) { return ufl_from_json(read_text_file(path)); }

std::string solution_to_json(const FlmInstance& inst, const FlmSolution& sol) {
    json doc;
    doc["open"] = sol.open_set;
    json matching = json::array();
    json assignment = json::array();
    for (std::size_t t = 0; t < sol.matching.size(); ++t) {
        auto [j, k] = inst.compat.edges[sol.matching[t]];
        matching.push_back(json::array({j, k}));
        assignment.push_back(json::array({j, k, sol.assignment[t]}));
    }
    doc["matching"] = matching;
    doc["assignment"] = assignment;
    doc["opening_cost"] = sol.opening_cost_total;
    doc["connection_cost"] = sol.connection_cost_total;
    doc["total_cost"] = sol.total();
    return doc.dump(2) + "\n";
}

FlmSolution solution_from_json(const FlmInstance& inst, const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& ex) {
        throw io_error(std::string("invalid solution JSON: ") + ex.what());
    }
    FlmSolution sol;
    try {
        for (const auto& i : doc.at("open")) sol.open_set.push_back(i.get<int>());
        std::map<Edge, int> fac;
        for (const auto& row : doc.at("assignment")) {
            if (row.size() != 3) throw io_error("assignment entries must be [j,k,facility]");
            fac[make_edge(row[0].get<int>(), row[1].get<int>())] = row[2].get<int>();
        }
        for (const auto& e : doc.at("matching")) {
            if (e.size() != 2) throw io_error("matching entries must be pairs");
            Edge pair = make_edge(e[0].get<int>(), e[1].get<int>());
            sol.matching.push_back(inst.compat.edge_id(pair.first, pair.second));
            auto it = fac.find(pair);
            sol.assignment.push_back(it == fac.end() ? -1 : it->second);
        }
        if (doc.contains("opening_cost")) sol.opening_cost_total = doc["opening_cost"].get<double>();
        if (doc.contains("connection_cost"))
            sol.connection_cost_total = doc["connection_cost"].get<double>();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& ex) {
        throw io_error(std::string("invalid solution JSON: ") + ex.what());
    }
    return sol;
}

FlmSolution load_solution(const FlmInstance& inst, const std::string& path) {
    return solution_from_json(inst, read_text_file(path));
}

std::string report_to_json(const FlmInstance& inst, const PipelineReport& rep) {
    json doc;
    doc["mode"] = mode_name(rep.resolved_mode);
    doc["lambda"] = rep.lambda;
    doc["seed"] = rep.seed;
    doc["trials"] = rep.trials;
    doc["nu"] = rep.nu;
    doc["lp_value"] = rep.lp_value;
    doc["lp_open"] = rep.lp_open;
    doc["lp_conn"] = rep.lp_conn;
    doc["cuts"] = rep.cuts;
    doc["guarantee_bound"] = rep.guarantee_bound;
    doc["cost"] = rep.solution.total();
    doc["mean_cost"] = rep.mean_cost;
    doc["best_seed"] = rep.best_seed;
    doc["matching_d_cost"] = rep.matching_d_cost;
    if (rep.reroute) {
        json rr;
        rr["iterations"] = rep.reroute->iterations;
        rr["initial_potential"] = rep.reroute->initial_potential;
        rr["final_potential"] = rep.reroute->final_potential;
        rr["transfer_total"] = rep.reroute->transfer_total;
        doc["reroute"] = rr;
    } else {
        doc["reroute"] = nullptr;
    }
    json timings;
    timings["lp"] = rep.ms_lp;
    timings["matching"] = rep.ms_matching;
    timings["reroute"] = rep.ms_reroute;
    timings["round"] = rep.ms_round;
    doc["timings_ms"] = timings;
    doc["solution"] = json::parse(solution_to_json(inst, rep.solution));
    return doc.dump(2) + "\n";
}

std::string exact_result_to_json(const FlmInstance& inst, const ExactResult& res) {
    json doc;
    doc["mode"] = "exact";
    doc["optimum"] = res.optimum;
    doc["facility_subsets_evaluated"] = res.facility_subsets_evaluated;
    doc["solution"] = json::parse(solution_to_json(inst, res.optimal_solution));
    return doc.dump(2) + "\n";
}

} // namespace flm
