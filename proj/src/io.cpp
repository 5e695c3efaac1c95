#include "ddsel/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ddsel {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  return out;
}

double parse_field(const std::string& field, const std::string& path, size_t line) {
  const char* begin = field.c_str();
  while (*begin == ' ' || *begin == '\t') ++begin;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == begin || (end && *end != '\0') || errno == ERANGE) {
    throw Error(ErrorCode::kMalformedProblem, path + ":" + std::to_string(line) + ": bad field '" + field + "'");
  }
  return v;
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json vector_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(parse_field(field, path, number));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kMalformedProblem, path + ":" + std::to_string(number) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kMalformedProblem, path + ": no data");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  return m;
}

Vector read_vector_csv(const std::string& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw Error(ErrorCode::kMalformedProblem, path + ": expected a single column");
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

void write_vector_csv(const std::string& path, const Vector& v) { write_matrix_csv(path, Matrix(v)); }

Json to_json(const Solution& s) {
  std::vector<int> support;
  for (int j : s.support) support.push_back(j + 1);
  return Json{{"beta", vector_json(s.beta)},
              {"support", support},
              {"objective", s.objective},
              {"residual_inf", s.residual_inf},
              {"delta", s.delta}};
}

Json to_json(const BoundSet& b) {
  return Json{{"coef_upper", vector_json(b.coef_upper)},
              {"pred_upper", vector_json(b.pred_upper)},
              {"l1_coef", b.l1_coef},
              {"l1_pred", b.l1_pred},
              {"global_coef", b.global_coef},
              {"provenance", to_string(b.provenance)},
              {"flags", b.flags}};
}

BoundSet bounds_from_json(const Json& j) {
  BoundSet b;
  try {
    b.coef_upper = vector_from(j.at("coef_upper"));
    b.pred_upper = vector_from(j.at("pred_upper"));
    b.l1_coef = j.at("l1_coef").get<double>();
    b.l1_pred = j.at("l1_pred").get<double>();
    b.global_coef = j.at("global_coef").get<double>();
    const auto provenance = j.value("provenance", std::string(to_string(BoundProvenance::kLpDerived)));
    b.provenance = provenance == to_string(BoundProvenance::kWarmStartDerived) ? BoundProvenance::kWarmStartDerived
                                                                              : BoundProvenance::kLpDerived;
    b.flags = j.value("flags", std::vector<std::string>{});
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedProblem, std::string("bad bound set: ") + e.what());
  }
  b.validate();
  return b;
}

Json to_json(const MiloResult& r) {
  Json progress = Json::array();
  for (const ProgressEntry& e : r.progress) {
    progress.push_back({{"seconds", e.seconds}, {"upper", e.upper}, {"lower", e.lower}, {"gap", e.gap}, {"nodes", e.nodes}});
  }
  Json out{{"status", to_string(r.status)},
           {"has_incumbent", r.has_incumbent},
           {"lower_bound", r.lower_bound},
           {"gap", r.gap},
           {"root_bound", r.root_bound},
           {"nodes_explored", r.nodes_explored},
           {"lp_iterations", r.lp_iterations},
           {"wall_time", r.wall_time},
           {"progress", progress},
           {"events", r.events}};
  if (r.has_incumbent) out["incumbent"] = to_json(r.incumbent);
  return out;
}

Json to_json(const PathResult& r) {
  Json points = Json::array();
  for (const PathPoint& pt : r.points) {
    Json j{{"delta", pt.delta}, {"optimal", pt.optimal}};
    if (pt.solution) j["solution"] = to_json(*pt.solution);
    if (!pt.error.empty()) j["error"] = pt.error;
    points.push_back(std::move(j));
  }
  Json reps = Json::array();
  for (const auto& [size, index] : r.representatives) reps.push_back({{"size", size}, {"point", index}});
  return Json{{"grid", r.grid}, {"points", points}, {"representatives", reps}};
}

Json to_json(const Metrics& m) {
  return Json{{"est_error", m.est_error},
              {"selection_error", m.selection_error},
              {"pred_error", m.pred_error},
              {"nonzeros", m.nonzeros}};
}

void write_path_csv(const std::string& path, const PathResult& r) {
  std::ofstream out = open_out(path);
  out << "delta,index,value\n";
  for (const PathPoint& pt : r.points) {
    if (!pt.solution) continue;
    for (int j : pt.solution->support) {
      out << format(pt.delta) << ',' << j + 1 << ',' << format(pt.solution->beta[j]) << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

Json read_json(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedProblem, path + ": " + e.what());
  }
}

}  // namespace ddsel
