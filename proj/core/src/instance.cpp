// SPDX-License-Identifier: Apache-2.0
#include "polygauge/instance.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polygauge/builders.hpp"
#include "polygauge/errors.hpp"
#include "polygauge/rng.hpp"

namespace polygauge {

using nlohmann::json;

namespace {

Eigen::VectorXd parse_vector(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  Eigen::VectorXd v(j.size());
  Eigen::Index i = 0;
  for (const auto& e : j) {
    if (!e.is_number())
      throw InputError(std::string(what) + " must contain numbers");
    v[i++] = e.get<double>();
  }
  return v;
}

// Row-major array of arrays.
Eigen::MatrixXd parse_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw InputError(std::string(what) + " must be a non-empty array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd m;
  Eigen::Index r = 0;
  for (const auto& row : j) {
    const Eigen::VectorXd v = parse_vector(row, what);
    if (cols < 0) {
      cols = v.size();
      m.resize(rows, cols);
    } else if (v.size() != cols) {
      throw InputError(std::string(what) + " has ragged rows");
    }
    m.row(r++) = v.transpose();
  }
  if (cols == 0) throw InputError(std::string(what) + " has empty rows");
  return m;
}

HDescriptor parse_h(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw InputError("h must be an object with a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  HDescriptor d;
  if (kind == "l1" || kind == "linf") {
    d.kind = kind == "l1" ? HDescriptor::Kind::l1 : HDescriptor::Kind::linf;
    if (!j.contains("n") || !j.at("n").is_number_integer())
      throw InputError("builder descriptor needs an integer \"n\"");
    d.n = j.at("n").get<Eigen::Index>();
  } else if (kind == "block") {
    d.kind = HDescriptor::Kind::block;
    if (!j.contains("blocks") || !j.at("blocks").is_array())
      throw InputError("block descriptor needs \"blocks\"");
    for (const auto& blk : j.at("blocks")) {
      std::vector<Eigen::Index> b;
      for (const auto& e : blk) {
        if (!e.is_number_integer())
          throw InputError("block entries must be integers");
        const Eigen::Index one_based = e.get<Eigen::Index>();
        if (one_based < 1) throw InputError("block indices are 1-based");
        b.push_back(one_based - 1);
      }
      d.blocks.push_back(std::move(b));
    }
  } else if (kind == "analysis_l1") {
    d.kind = HDescriptor::Kind::analysis_l1;
    if (!j.contains("L")) throw InputError("analysis_l1 descriptor needs \"L\"");
    d.analysis_op = parse_matrix(j.at("L"), "L");
  } else if (kind == "explicit") {
    d.kind = HDescriptor::Kind::explicit_columns;
    if (!j.contains("columns"))
      throw InputError("explicit descriptor needs \"columns\"");
    // Stored as a list of columns; transpose of the row-major parse.
    d.columns = parse_matrix(j.at("columns"), "columns").transpose();
  } else {
    throw InputError("unknown gauge kind: " + kind);
  }
  return d;
}

Instance parse_one(const json& j) {
  if (!j.is_object()) throw InputError("instance must be an object");
  if (!j.contains("phi") || !j.contains("h"))
    throw InputError("instance needs \"phi\" and \"h\"");

  Instance inst;
  inst.phi = parse_matrix(j.at("phi"), "phi");
  inst.h_desc = parse_h(j.at("h"));
  if (inst.h_desc.dimension() != inst.phi.cols())
    throw InputError("phi and h disagree on the ambient dimension");

  if (j.contains("x0")) {
    inst.x0 = parse_vector(j.at("x0"), "x0");
    if (inst.x0->size() != inst.phi.cols())
      throw InputError("x0 has the wrong length");
  }
  if (j.contains("y")) {
    inst.y_explicit = parse_vector(j.at("y"), "y");
    if (inst.y_explicit->size() != inst.phi.rows())
      throw InputError("y has the wrong length");
  }
  if (j.contains("lambda")) {
    inst.lambda = j.at("lambda").get<double>();
    if (!(*inst.lambda > 0)) throw InputError("lambda must be positive");
  }
  if (j.contains("seed")) inst.seed = j.at("seed").get<std::uint64_t>();

  const bool has_w = j.contains("w");
  const bool has_sigma = j.contains("sigma");
  if (has_w && has_sigma)
    throw InputError("give exactly one of \"w\" and \"sigma\"");
  if (has_w) {
    inst.w = parse_vector(j.at("w"), "w");
    if (inst.w->size() != inst.phi.rows())
      throw InputError("w has the wrong length");
  } else if (has_sigma) {
    inst.sigma = j.at("sigma").get<double>();
    if (*inst.sigma < 0) throw InputError("sigma must be nonnegative");
    if (!j.contains("noise_seed"))
      throw InputError("sigma needs a \"noise_seed\"");
    inst.noise_seed = j.at("noise_seed").get<std::uint64_t>();
    Xoshiro256pp rng(*inst.noise_seed);
    Eigen::VectorXd w(inst.phi.rows());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = *inst.sigma * rng.gaussian();
    inst.w = w;
  }
  return inst;
}

} // namespace

Eigen::Index HDescriptor::dimension() const {
  switch (kind) {
    case Kind::l1:
    case Kind::linf: return n;
    case Kind::block: {
      Eigen::Index total = 0;
      for (const auto& b : blocks)
        total += static_cast<Eigen::Index>(b.size());
      return total;
    }
    case Kind::analysis_l1: return analysis_op.cols();
    case Kind::explicit_columns: return columns.rows();
  }
  return 0;
}

HMatrix build_gauge(const HDescriptor& desc) {
  switch (desc.kind) {
    case HDescriptor::Kind::l1: return build_l1(desc.n);
    case HDescriptor::Kind::linf: return build_linf(desc.n);
    case HDescriptor::Kind::block:
      return build_block_l1_linf(make_partition(desc.blocks));
    case HDescriptor::Kind::analysis_l1:
      return build_analysis_l1(desc.analysis_op);
    case HDescriptor::Kind::explicit_columns:
      return make_hmatrix(desc.columns);
  }
  throw InputError("unknown gauge descriptor");
}

Eigen::VectorXd Instance::observation() const {
  if (y_explicit) return *y_explicit;
  if (!x0)
    throw InputError("instance has neither y nor x0; no observation exists");
  Eigen::VectorXd y = phi * *x0;
  if (w) y += *w;
  return y;
}

Eigen::VectorXd Instance::noise() const {
  if (w) return *w;
  return Eigen::VectorXd::Zero(phi.rows());
}

std::vector<Instance> parse_instances(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw InputError("top level must be an object");
  if (!j.contains("schema") || !j.at("schema").is_number_integer() ||
      j.at("schema").get<int>() != 1)
    throw InputError("unsupported or missing \"schema\" (expected 1)");

  std::vector<Instance> out;
  if (j.contains("instances")) {
    for (const auto& e : j.at("instances")) out.push_back(parse_one(e));
  } else {
    out.push_back(parse_one(j));
  }
  if (out.empty()) throw InputError("no instances in file");
  return out;
}

std::vector<Instance> load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instances(buf.str());
}

std::string json_fingerprint(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  const std::string canonical = j.dump();
  std::uint64_t hash = 1469598103934665603ULL;
  for (const unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf);
}

} // namespace polygauge
