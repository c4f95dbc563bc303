#ifndef FLM_JSON_IO_HPP
#define FLM_JSON_IO_HPP

#include <string>

#include "flm/instance.hpp"
#include "flm/oracle.hpp"
#include "flm/pipeline.hpp"
#include "flm/ufl.hpp"

namespace flm {

// Instance schema:
//   {"facilities":[{"id",...,"opening_cost",...,"label"?}],
//    "clients":[{"id",...,"label"?}],
//    "metric":[[...]],               // rows/cols: facilities then clients
//    "edges":[[j,k],...]}
// write(read(file)) reproduces the file up to whitespace.
std::string instance_to_json(const FlmInstance& inst);
FlmInstance instance_from_json(const std::string& text);
FlmInstance load_instance(const std::string& path);
void save_instance(const FlmInstance& inst, const std::string& path);

// UFL schema: {"facilities":[{"id","opening_cost"}], "clients":[{"id"}],
//              "assignment_cost":[[...]]}  (rows = facilities)
UflInstance ufl_from_json(const std::string& text);
UflInstance load_ufl(const std::string& path);

// Solution schema: {"open":[...], "matching":[[j,k],...],
//                   "assignment":[[j,k,i],...], costs...}
std::string solution_to_json(const FlmInstance& inst, const FlmSolution& sol);
FlmSolution solution_from_json(const FlmInstance& inst, const std::string& text);
FlmSolution load_solution(const FlmInstance& inst, const std::string& path);

std::string report_to_json(const FlmInstance& inst, const PipelineReport& rep);
std::string exact_result_to_json(const FlmInstance& inst, const ExactResult& res);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace flm

#endif
