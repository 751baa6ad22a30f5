#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qcond/chain.hpp"
#include "qcond/channels.hpp"
#include "qcond/complex_matrix.hpp"
#include "qcond/conditional.hpp"
#include "qcond/errors.hpp"
#include "qcond/measures.hpp"
#include "qcond/states.hpp"
#include "qcond/verify.hpp"

namespace qcond::io {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr int kSchemaMajor = 1;

// --- document plumbing ------------------------------------------------------

inline json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
}

inline const json& require_field(const json& j, const char* field, const char* where) {
  const auto it = j.find(field);
  if (it == j.end())
    throw SchemaMismatch(std::string(where) + ": missing field '" + field + "'");
  return *it;
}

inline void check_version(const json& j, const char* where) {
  const json& v = require_field(j, "version", where);
  if (!v.is_string())
    throw SchemaMismatch(std::string(where) + ": field 'version' must be a string");
  const std::string s = v.get<std::string>();
  const std::size_t dot = s.find('.');
  int major = -1;
  try {
    major = std::stoi(dot == std::string::npos ? s : s.substr(0, dot));
  } catch (...) {
    throw SchemaMismatch(std::string(where) + ": malformed version '" + s + "'");
  }
  if (major != kSchemaMajor)
    throw SchemaMismatch(std::string(where) + ": unsupported major version '" + s + "'");
}

// --- complex matrices (fragment, no version field) --------------------------

inline json encode(const ComplexMatrix& m) {
  json data = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      data.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline ComplexMatrix decode_matrix(const json& j, const char* where = "matrix") {
  const std::size_t rows = require_field(j, "rows", where).get<std::size_t>();
  const std::size_t cols = require_field(j, "cols", where).get<std::size_t>();
  const json& data = require_field(j, "data", where);
  if (!data.is_array() || data.size() != rows * cols)
    throw SchemaMismatch(std::string(where) + ": field 'data' must hold rows*cols entries");
  ComplexMatrix m(rows, cols);
  std::size_t k = 0;
  for (const auto& entry : data) {
    if (!entry.is_array() || entry.size() != 2)
      throw SchemaMismatch(std::string(where) + ": entries of 'data' must be [re, im] pairs");
    m.data()[k++] = Complex(entry[0].get<double>(), entry[1].get<double>());
  }
  if (!m.all_finite())
    throw SchemaMismatch(std::string(where) + ": field 'data' holds non-finite values");
  return m;
}

// --- density matrices --------------------------------------------------------

inline json encode(const DensityMatrix& rho) {
  return {{"version", kSchemaVersion},
          {"dim", rho.dim()},
          {"matrix", encode(rho.matrix())}};
}

inline DensityMatrix decode_state(const json& j, const StateOptions& opt = {}) {
  check_version(j, "state");
  const std::size_t dim = require_field(j, "dim", "state").get<std::size_t>();
  ComplexMatrix m = decode_matrix(require_field(j, "matrix", "state"), "state.matrix");
  if (m.rows() != dim || m.cols() != dim)
    throw SchemaMismatch("state: field 'dim' does not match the matrix shape");
  return density_from_matrix(m, opt);
}

// --- channels ----------------------------------------------------------------

inline json encode(const QuantumChannel& e) {
  json kraus = json::array();
  for (const auto& k : e.kraus()) kraus.push_back(encode(k));
  return {{"version", kSchemaVersion},
          {"dim_in", e.dim_in()},
          {"dim_out", e.dim_out()},
          {"kraus", std::move(kraus)}};
}

inline QuantumChannel decode_channel(const json& j, double tol = 1e-10) {
  check_version(j, "channel");
  const std::size_t din = require_field(j, "dim_in", "channel").get<std::size_t>();
  const std::size_t dout = require_field(j, "dim_out", "channel").get<std::size_t>();
  const json& kraus = require_field(j, "kraus", "channel");
  if (!kraus.is_array() || kraus.empty())
    throw SchemaMismatch("channel: field 'kraus' must be a nonempty array");
  std::vector<ComplexMatrix> ks;
  ks.reserve(kraus.size());
  for (const auto& entry : kraus) ks.push_back(decode_matrix(entry, "channel.kraus"));
  QuantumChannel e = validate_channel(std::move(ks), tol);
  if (e.dim_in() != din || e.dim_out() != dout)
    throw SchemaMismatch("channel: declared dimensions do not match the Kraus shapes");
  return e;
}

// --- conditional tables ------------------------------------------------------

inline json encode(const ConditionalTable& t) {
  json rows = json::array();
  for (std::size_t r = 0; r < t.n_to; ++r) {
    json row = json::array();
    for (std::size_t q = 0; q < t.n_from; ++q) row.push_back(t.p(r, q));
    rows.push_back(std::move(row));
  }
  return {{"version", kSchemaVersion},
          {"n_from", t.n_from},
          {"n_to", t.n_to},
          {"p_rq", std::move(rows)},
          {"p_q", t.p_from.entries()},
          {"p_r", t.p_to.entries()},
          {"degeneracy_q", t.degeneracy_from},
          {"degeneracy_r", t.degeneracy_to}};
}

inline ConditionalTable decode_table(const json& j) {
  check_version(j, "table");
  ConditionalTable t;
  t.n_from = require_field(j, "n_from", "table").get<std::size_t>();
  t.n_to = require_field(j, "n_to", "table").get<std::size_t>();
  const json& rows = require_field(j, "p_rq", "table");
  if (!rows.is_array() || rows.size() != t.n_to)
    throw SchemaMismatch("table: field 'p_rq' must hold n_to rows");
  t.probs = RealMatrix(t.n_to, t.n_from);
  for (std::size_t r = 0; r < t.n_to; ++r) {
    if (!rows[r].is_array() || rows[r].size() != t.n_from)
      throw SchemaMismatch("table: rows of 'p_rq' must hold n_from entries");
    for (std::size_t q = 0; q < t.n_from; ++q) t.probs(r, q) = rows[r][q].get<double>();
  }
  t.p_from = ProbVector(require_field(j, "p_q", "table").get<std::vector<double>>());
  t.p_to = ProbVector(require_field(j, "p_r", "table").get<std::vector<double>>());
  if (t.p_from.size() != t.n_from || t.p_to.size() != t.n_to)
    throw SchemaMismatch("table: marginal lengths do not match n_from/n_to");
  if (j.contains("degeneracy_q"))
    t.degeneracy_from = j["degeneracy_q"].get<std::vector<std::vector<std::size_t>>>();
  if (j.contains("degeneracy_r"))
    t.degeneracy_to = j["degeneracy_r"].get<std::vector<std::vector<std::size_t>>>();
  const TableResiduals res = table_residuals(t);
  if (res.range > 1e-6 || res.column_sum > 1e-6 || res.total_prob > 1e-6)
    throw InconsistentTable("table violates stochasticity or total probability");
  return t;
}

// --- info summaries ----------------------------------------------------------

inline json encode_base(LogBase base) {
  return base == LogBase::two ? json(2) : json("e");
}

inline json encode(const InfoSummary& s) {
  return {{"version", kSchemaVersion},
          {"S_Q", s.S_initial},
          {"S_R", s.S_final},
          {"J", s.J},
          {"I", s.I},
          {"J_per_q", s.per_q_J},
          {"base", encode_base(s.base)}};
}

// --- verification reports ----------------------------------------------------

inline json encode(const ChannelMix& mix) {
  return {{"random_cptp", mix.random_cptp},
          {"unital_mixture", mix.unital_mixture},
          {"pinching", mix.pinch},
          {"unitary", mix.unitary},
          {"depolarizing", mix.depolarize},
          {"partial_trace", mix.trace_out}};
}

inline ChannelMix decode_mix(const json& j) {
  ChannelMix mix;
  mix.random_cptp = require_field(j, "random_cptp", "channel_mix").get<double>();
  mix.unital_mixture = require_field(j, "unital_mixture", "channel_mix").get<double>();
  mix.pinch = require_field(j, "pinching", "channel_mix").get<double>();
  mix.unitary = require_field(j, "unitary", "channel_mix").get<double>();
  mix.depolarize = require_field(j, "depolarizing", "channel_mix").get<double>();
  mix.trace_out = require_field(j, "partial_trace", "channel_mix").get<double>();
  return mix;
}

inline json encode(const TrialConfig& cfg) {
  return {{"master_seed", cfg.master_seed},
          {"n_trials", cfg.n_trials},
          {"dims", cfg.dims},
          {"max_env_dim", cfg.max_env_dim},
          {"channel_mix", encode(cfg.channel_mix)},
          {"depolarize_lambda", cfg.depolarize_lambda}};
}

inline TrialConfig decode_config(const json& j) {
  TrialConfig cfg;
  cfg.master_seed = require_field(j, "master_seed", "config").get<std::uint64_t>();
  cfg.n_trials = require_field(j, "n_trials", "config").get<std::size_t>();
  cfg.dims = require_field(j, "dims", "config").get<std::vector<std::size_t>>();
  cfg.max_env_dim = require_field(j, "max_env_dim", "config").get<std::size_t>();
  cfg.channel_mix = decode_mix(require_field(j, "channel_mix", "config"));
  if (j.contains("depolarize_lambda"))
    cfg.depolarize_lambda = j["depolarize_lambda"].get<double>();
  return cfg;
}

inline json encode(const CheckResult& c) {
  return {{"name", c.name},
          {"statement", c.statement},
          {"kind", c.kind == CheckKind::identity ? "identity" : "inequality"},
          {"tolerance", c.tolerance},
          {"trials", c.trials},
          {"failures", c.failures},
          {"worst_slack", c.worst},
          {"worst_seed", c.worst_seed}};
}

inline CheckResult decode_check(const json& j) {
  CheckResult c;
  c.name = require_field(j, "name", "check").get<std::string>();
  c.statement = require_field(j, "statement", "check").get<std::string>();
  const std::string kind = require_field(j, "kind", "check").get<std::string>();
  if (kind == "identity") {
    c.kind = CheckKind::identity;
  } else if (kind == "inequality") {
    c.kind = CheckKind::inequality;
  } else {
    throw SchemaMismatch("check: unknown kind '" + kind + "'");
  }
  c.tolerance = require_field(j, "tolerance", "check").get<double>();
  c.trials = require_field(j, "trials", "check").get<std::size_t>();
  c.failures = require_field(j, "failures", "check").get<std::size_t>();
  c.worst = require_field(j, "worst_slack", "check").get<double>();
  c.worst_seed = require_field(j, "worst_seed", "check").get<std::uint64_t>();
  return c;
}

inline json encode(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(encode(c));
  return {{"version", kSchemaVersion},
          {"config", encode(r.config)},
          {"checks", std::move(checks)},
          {"pass", r.pass}};
}

inline VerificationReport decode_report(const json& j) {
  check_version(j, "report");
  VerificationReport r;
  r.config = decode_config(require_field(j, "config", "report"));
  const json& checks = require_field(j, "checks", "report");
  if (!checks.is_array()) throw SchemaMismatch("report: field 'checks' must be an array");
  for (const auto& c : checks) r.checks.push_back(decode_check(c));
  r.pass = require_field(j, "pass", "report").get<bool>();
  return r;
}

inline json encode(const TrialTrace& t) {
  return {{"version", kSchemaVersion},
          {"seed", t.seed},
          {"dim", t.dim},
          {"rank", t.rank},
          {"channel_kind", t.channel_kind},
          {"state", encode(t.rho_Q)},
          {"channel", encode(t.channel)},
          {"table", encode(t.table)},
          {"measures", encode(t.summary)},
          {"check", encode(t.check)}};
}

// --- CSV ----------------------------------------------------------------------

// 17 significant digits: enough for exact double round-trips.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string to_csv(const RealMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += "\r\n";
  }
  return out;
}

inline std::string to_csv(const ConditionalTable& t) {
  std::string out = "table,p_rq\r\n" + to_csv(t.probs);
  out += "vector,p_q\r\n";
  for (std::size_t q = 0; q < t.n_from; ++q) {
    if (q) out += ',';
    out += format_double(t.p_from[q]);
  }
  out += "\r\nvector,p_r\r\n";
  for (std::size_t r = 0; r < t.n_to; ++r) {
    if (r) out += ',';
    out += format_double(t.p_to[r]);
  }
  out += "\r\n";
  return out;
}

inline std::string to_csv(const VerificationReport& r) {
  std::string out =
      "name,statement,kind,tolerance,trials,failures,worst_slack,worst_seed\r\n";
  for (const auto& c : r.checks) {
    out += csv_escape(c.name) + ',' + csv_escape(c.statement) + ',';
    out += (c.kind == CheckKind::identity ? "identity" : "inequality");
    out += ',' + format_double(c.tolerance) + ',' + std::to_string(c.trials) + ',' +
           std::to_string(c.failures) + ',' + format_double(c.worst) + ',' +
           std::to_string(c.worst_seed) + "\r\n";
  }
  return out;
}

}  // namespace qcond::io
