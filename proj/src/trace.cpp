#include "memgrad/trace.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace memgrad {

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

const char* ConvergenceTrace::csv_header() {
  return "iteration,objective,guarantee,lipschitz,step,bundle_count,"
         "grad_calls,prox_calls,obj_evals,restart,psi_star";
}

std::string ConvergenceTrace::to_csv() const {
  std::ostringstream out;
  out << csv_header() << '\n';
  for (const TraceRow& r : rows) {
    out << r.iteration << ',' << fmt(r.objective) << ',' << fmt(r.guarantee) << ','
        << fmt(r.lipschitz) << ',' << fmt(r.step) << ',' << r.bundle_count << ','
        << r.grad_calls << ',' << r.prox_calls << ',' << r.obj_evals << ','
        << r.restart << ',' << fmt(r.psi_star) << '\n';
  }
  return out.str();
}

void ConvergenceTrace::write_csv(const std::string& path) const {
  std::ofstream file(path, std::ios::binary);  // binary keeps LF endings
  if (!file) throw std::runtime_error("trace: cannot open " + path);
  file << to_csv();
}

namespace {
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);  // strtod accepts nan/inf
  if (end == s.c_str()) throw std::runtime_error("trace: bad number: " + s);
  return v;
}
}  // namespace

ConvergenceTrace read_trace_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("trace: cannot open " + path);
  std::string line;
  if (!std::getline(file, line)) throw std::runtime_error("trace: empty file");
  if (line != ConvergenceTrace::csv_header())
    throw std::runtime_error("trace: unexpected header: " + line);
  ConvergenceTrace trace;
  while (std::getline(file, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 11) throw std::runtime_error("trace: malformed row: " + line);
    TraceRow r;
    r.iteration = std::stol(fields[0]);
    r.objective = parse_double(fields[1]);
    r.guarantee = parse_double(fields[2]);
    r.lipschitz = parse_double(fields[3]);
    r.step = parse_double(fields[4]);
    r.bundle_count = std::stoi(fields[5]);
    r.grad_calls = std::stol(fields[6]);
    r.prox_calls = std::stol(fields[7]);
    r.obj_evals = std::stol(fields[8]);
    r.restart = std::stoi(fields[9]);
    r.psi_star = parse_double(fields[10]);
    trace.rows.push_back(r);
  }
  return trace;
}

}  // namespace memgrad
