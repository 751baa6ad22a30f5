// qcond: conditional-probability analysis of CPTP evolutions at desk scale.
//
// Machine-readable output (JSON, or CSV with --format csv) goes to stdout;
// human diagnostics go to stderr. Exit codes: 0 success/pass, 1 check
// failure, 2 usage or input error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qcond/generalized.hpp"
#include "qcond/io.hpp"
#include "qcond/qcond.hpp"
#include "qcond/subsystems.hpp"

namespace {

using namespace qcond;
using nlohmann::json;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open input file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

DensityMatrix load_state(const std::string& path) {
  return io::decode_state(io::parse_document(read_input(path)));
}

QuantumChannel load_channel(const std::string& path) {
  return io::decode_channel(io::parse_document(read_input(path)));
}

LogBase parse_base(const std::string& base) {
  if (base == "2") return LogBase::two;
  if (base == "e") return LogBase::e;
  throw Error("log base must be '2' or 'e', got '" + base + "'");
}

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

json encode_generalized(const GeneralizedTable& t) {
  json rows = json::array();
  for (std::size_t r = 0; r < t.entries.rows; ++r) {
    json row = json::array();
    for (std::size_t k = 0; k < t.entries.cols; ++k) row.push_back(t.entries(r, k));
    rows.push_back(std::move(row));
  }
  return {{"entries", std::move(rows)},
          {"lambda_in", t.lambda_in},
          {"lambda_out", t.lambda_out},
          {"Lambda", t.overlap_out},
          {"Lambda_via_sum", t.overlap_via_sum},
          {"overlap_residual", t.overlap_residual},
          {"lambda_gap", t.lambda_gap},
          {"resolves_identity", t.resolves_identity}};
}

// ---------------------------------------------------------------------------
// Worked scenarios with fixed built-in parameters. Each prints the measured
// quantities next to the relation they are expected to satisfy.

json demo_pure_state() {
  const DensityMatrix psi = random_density(3, 1, 11);
  const QuantumChannel e = random_channel(3, 3, 3, 12);
  const InfoSummary s = summarize(conditional_probs(e, psi).table);
  const double r_j = std::abs(s.J - s.S_final);
  const double r_i = std::abs(s.I);
  return {{"quantities",
           {{"S_Q", s.S_initial}, {"S_R", s.S_final}, {"J", s.J}, {"I", s.I}}},
          {"relations", {"J = S(rho_R)", "I = 0"}},
          {"residuals", {{"J_vs_S_R", r_j}, {"I_vs_zero", r_i}}},
          {"tolerance", 1e-9},
          {"pass", r_j <= 1e-9 && r_i <= 1e-9}};
}

json demo_unitary() {
  const DensityMatrix rho = random_density(3, 3, 21);
  const QuantumChannel u = unitary_channel(random_unitary(3, 22));
  const ConditionalResult res = conditional_probs(u, rho);
  const InfoSummary s = summarize(res.table);
  const double r_delta =
      pairing_delta_residual(res.table, max_overlap_pairing(res.table));
  const double r_i = std::abs(s.I - s.S_initial);
  return {{"quantities",
           {{"S_Q", s.S_initial}, {"S_R", s.S_final}, {"J", s.J}, {"I", s.I}}},
          {"relations", {"p(r|q) = delta under pairing", "J = 0", "I = S(rho_Q)"}},
          {"residuals",
           {{"table_vs_delta", r_delta}, {"J_vs_zero", s.J}, {"I_vs_S_Q", r_i}}},
          {"tolerance", 1e-9},
          {"pass", r_delta <= 1e-9 && s.J <= 1e-9 && r_i <= 1e-9}};
}

json demo_depolarizing() {
  const DensityMatrix rho =
      density_from_matrix(ComplexMatrix{{0.75, 0.0}, {0.0, 0.25}});
  const InfoSummary s = summarize(conditional_probs(depolarizing(2, 0.5), rho).table);
  const double expected_j = 0.8112781244591328;
  const double expected_i = 0.14315587846583222;
  const double r_j = std::abs(s.J - expected_j);
  const double r_i = std::abs(s.I - expected_i);
  return {{"quantities",
           {{"S_Q", s.S_initial}, {"S_R", s.S_final}, {"J", s.J}, {"I", s.I}}},
          {"expected", {{"J", expected_j}, {"I", expected_i}}},
          {"residuals", {{"J", r_j}, {"I", r_i}}},
          {"tolerance", 1e-5},
          {"pass", r_j <= 1e-5 && r_i <= 1e-5}};
}

json demo_measurement() {
  const DensityMatrix rho =
      density_from_matrix(ComplexMatrix{{0.75, 0.0}, {0.0, 0.25}});
  const double s = 1.0 / std::sqrt(2.0);
  const QuantumChannel pinch = pinching({CVec{s, s}, CVec{s, -s}});
  const ConditionalResult res = conditional_probs(pinch, rho);
  const InfoSummary sum = summarize(res.table);
  double row_res = 0.0;
  for (std::size_t r = 0; r < res.table.n_to; ++r)
    row_res = std::max(row_res, std::abs(res.table.probs.row_sum(r) - 1.0));
  const double growth = sum.S_final - sum.S_initial;
  return {{"quantities",
           {{"S_Q", sum.S_initial}, {"S_R", sum.S_final}, {"growth", growth}}},
          {"relations", {"S(rho_R) >= S(rho_Q)", "table doubly stochastic"}},
          {"residuals", {{"doubly_stochastic", row_res}}},
          {"tolerance", 1e-9},
          {"pass", growth >= -1e-9 && row_res <= 1e-9}};
}

json demo_bell_subsystem() {
  ComplexMatrix bell(4, 4);
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  const ParentChild pc =
      subsystem_conditional(density_from_matrix(bell), 2, 2, Subsystem::A);
  const EntanglementBound bound = entanglement_bound_check(pc);
  const double r_lhs = std::abs(bound.lhs - 1.0);
  const double r_rhs = std::abs(bound.rhs - 1.0);
  return {{"quantities",
           {{"-S(B|A)", bound.lhs}, {"J(A|AB)", bound.rhs}, {"slack", bound.slack}}},
          {"expected", {{"-S(B|A)", 1.0}, {"J(A|AB)", 1.0}}},
          {"residuals",
           {{"lhs", r_lhs}, {"rhs", r_rhs}, {"slack", std::abs(bound.slack)}}},
          {"tolerance", 1e-9},
          {"pass", r_lhs <= 1e-9 && r_rhs <= 1e-9 && std::abs(bound.slack) <= 1e-9}};
}

json demo_holevo() {
  ComplexMatrix zero(2, 2);
  zero(0, 0) = 1.0;
  const ComplexMatrix plus{{0.5, 0.5}, {0.5, 0.5}};
  const Ensemble ens =
      make_ensemble(ProbVector({0.5, 0.5}),
                    {density_from_matrix(zero), density_from_matrix(plus)});
  const double chi = holevo_chi(ens);
  const double expected = 0.6008760366928562;
  const double residual = std::abs(chi - expected);
  return {{"quantities", {{"chi", chi}}},
          {"expected", {{"chi", expected}}},
          {"residuals", {{"chi", residual}}},
          {"tolerance", 1e-5},
          {"pass", residual <= 1e-5}};
}

int run_demo(const std::string& name) {
  json body;
  if (name == "pure-state") {
    body = demo_pure_state();
  } else if (name == "unitary") {
    body = demo_unitary();
  } else if (name == "depolarizing") {
    body = demo_depolarizing();
  } else if (name == "measurement") {
    body = demo_measurement();
  } else if (name == "bell-subsystem") {
    body = demo_bell_subsystem();
  } else if (name == "holevo") {
    body = demo_holevo();
  } else {
    throw UnknownDemo("no demo named '" + name +
                      "' (try pure-state, unitary, depolarizing, measurement, "
                      "bell-subsystem, holevo)");
  }
  body["version"] = io::kSchemaVersion;
  body["demo"] = name;
  emit(body);
  return body["pass"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional-probability information measures for CPTP evolutions"};
  app.require_subcommand(1);

  // state random
  auto* state_cmd = app.add_subcommand("state", "generate states");
  auto* state_random =
      state_cmd->add_subcommand("random", "seeded random density matrix");
  std::size_t st_dim = 2, st_rank = 2;
  std::uint64_t st_seed = 0;
  state_random->add_option("--dim", st_dim, "Hilbert space dimension")->required();
  state_random->add_option("--rank", st_rank, "rank of the sampled state")->required();
  state_random->add_option("--seed", st_seed, "generator seed (default 0)")
      ->envname("QCOND_SEED");
  state_cmd->require_subcommand(1);

  // channel <kind>
  auto* channel_cmd = app.add_subcommand("channel", "generate channels");
  channel_cmd->require_subcommand(1);
  auto* ch_random = channel_cmd->add_subcommand("random", "random CPTP map");
  std::size_t ch_din = 2, ch_dout = 2, ch_env = 2;
  std::uint64_t ch_seed = 0;
  ch_random->add_option("--dim-in", ch_din, "input dimension")->required();
  ch_random->add_option("--dim-out", ch_dout, "output dimension")->required();
  ch_random->add_option("--env", ch_env, "environment dimension (Kraus count)");
  ch_random->add_option("--seed", ch_seed, "generator seed (default 0)")
      ->envname("QCOND_SEED");
  auto* ch_depol =
      channel_cmd->add_subcommand("depolarizing", "rho -> (1-l)rho + l I/d");
  auto* ch_deph = channel_cmd->add_subcommand("dephasing", "diagonal damping");
  std::size_t ch_dim = 2;
  double ch_lambda = 0.5;
  for (auto* c : {ch_depol, ch_deph}) {
    c->add_option("--dim", ch_dim, "dimension")->required();
    c->add_option("--lambda", ch_lambda, "strength in [0, 1]")->required();
  }
  auto* ch_unital =
      channel_cmd->add_subcommand("random-unital", "mixture of unitaries");
  std::size_t ch_units = 3;
  ch_unital->add_option("--dim", ch_dim, "dimension")->required();
  ch_unital->add_option("--unitaries", ch_units, "number of unitaries");
  ch_unital->add_option("--seed", ch_seed, "generator seed (default 0)")
      ->envname("QCOND_SEED");
  auto* ch_trace = channel_cmd->add_subcommand("partial-trace", "discard one factor");
  std::size_t ch_da = 2, ch_db = 2;
  std::string ch_traced = "B";
  ch_trace->add_option("--dim-a", ch_da, "first factor dimension")->required();
  ch_trace->add_option("--dim-b", ch_db, "second factor dimension")->required();
  ch_trace->add_option("--traced", ch_traced, "factor to discard: A or B");

  // condprob / measures
  auto* condprob = app.add_subcommand("condprob", "conditional probability table");
  auto* measures = app.add_subcommand("measures", "entropy and information summary");
  std::string in_channel, in_state, format = "json", base = "2";
  for (auto* c : {condprob, measures}) {
    c->add_option("--channel", in_channel, "channel JSON file ('-' for stdin)")
        ->required();
    c->add_option("--state", in_state, "state JSON file ('-' for stdin)")->required();
    c->add_option("--base", base, "log base: 2 or e");
  }
  condprob->add_option("--format", format, "json or csv");

  // chain
  auto* chain_cmd = app.add_subcommand("chain", "two-step process analysis");
  std::string chain_state, chain_stage1, chain_stage2, chain_format = "json",
                           chain_base = "2";
  std::uint64_t chain_seed = 0;
  std::size_t chain_samples = 0;
  chain_cmd->add_option("--state", chain_state, "initial state JSON")->required();
  chain_cmd->add_option("--stage1", chain_stage1, "first channel JSON")->required();
  chain_cmd->add_option("--stage2", chain_stage2, "second (raw) channel JSON")
      ->required();
  chain_cmd->add_option("--seed", chain_seed, "sampling seed (default 0)")
      ->envname("QCOND_SEED");
  chain_cmd->add_option("--samples", chain_samples, "trajectory count (0 = none)");
  chain_cmd->add_option("--format", chain_format, "json or csv");
  chain_cmd->add_option("--base", chain_base, "log base: 2 or e");

  // subsys
  auto* subsys_cmd = app.add_subcommand("subsys", "parent-subsystem conditionals");
  std::string subsys_state, subsys_which = "A", subsys_base = "2";
  std::vector<std::size_t> subsys_dims;
  subsys_cmd->add_option("--state", subsys_state, "bipartite state JSON")->required();
  subsys_cmd->add_option("--dims", subsys_dims, "factor dimensions dA,dB")
      ->required()
      ->delimiter(',')
      ->expected(2);
  subsys_cmd->add_option("--which", subsys_which, "kept subsystem: A or B");
  subsys_cmd->add_option("--base", subsys_base, "log base: 2 or e");

  // generalized
  auto* gen_cmd = app.add_subcommand("generalized", "non-orthogonal decompositions");
  std::string gen_channel, gen_state;
  std::size_t gen_members = 3;
  std::uint64_t gen_seed = 0;
  gen_cmd->add_option("--channel", gen_channel, "channel JSON")->required();
  gen_cmd->add_option("--state", gen_state, "state JSON")->required();
  gen_cmd->add_option("--members", gen_members, "decomposition member count")
      ->required();
  gen_cmd->add_option("--seed", gen_seed, "generator seed (default 0)")
      ->envname("QCOND_SEED");

  // verify
  auto* verify_cmd =
      app.add_subcommand("verify", "randomized identity/inequality suite");
  TrialConfig cfg;
  std::string verify_format = "json", reproduce_check;
  std::uint64_t reproduce_seed = 0;
  bool have_reproduce_seed = false;
  verify_cmd->add_option("--trials", cfg.n_trials, "number of trials");
  verify_cmd->add_option("--dims", cfg.dims, "dimensions, e.g. 2,3,4")->delimiter(',');
  verify_cmd->add_option("--seed", cfg.master_seed, "master seed (default 42)")
      ->envname("QCOND_SEED");
  verify_cmd->add_option("--env-max", cfg.max_env_dim, "largest environment dimension");
  verify_cmd->add_option("--format", verify_format, "json or csv");
  verify_cmd->add_option("--reproduce-check", reproduce_check,
                         "re-run one named check for --reproduce-seed");
  verify_cmd
      ->add_option_function<std::uint64_t>(
          "--reproduce-seed",
          [&](std::uint64_t s) {
            reproduce_seed = s;
            have_reproduce_seed = true;
          },
          "trial seed to reproduce")
      ->needs(verify_cmd->get_option("--reproduce-check"));

  // demo
  auto* demo_cmd = app.add_subcommand("demo", "worked scenarios");
  std::string demo_name;
  demo_cmd->add_option("name", demo_name, "scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (state_random->parsed()) {
      emit(io::encode(random_density(st_dim, st_rank, st_seed)));
      return 0;
    }
    if (ch_random->parsed()) {
      emit(io::encode(random_channel(ch_din, ch_dout, ch_env, ch_seed)));
      return 0;
    }
    if (ch_depol->parsed()) {
      emit(io::encode(depolarizing(ch_dim, ch_lambda)));
      return 0;
    }
    if (ch_deph->parsed()) {
      emit(io::encode(dephasing(ch_dim, ch_lambda)));
      return 0;
    }
    if (ch_unital->parsed()) {
      emit(io::encode(random_unital_channel(ch_dim, ch_units, ch_seed)));
      return 0;
    }
    if (ch_trace->parsed()) {
      if (ch_traced != "A" && ch_traced != "B")
        throw Error("--traced must be A or B");
      emit(io::encode(partial_trace_channel(
          ch_da, ch_db, ch_traced == "A" ? Subsystem::A : Subsystem::B)));
      return 0;
    }
    if (condprob->parsed()) {
      const ConditionalResult res =
          conditional_probs(load_channel(in_channel), load_state(in_state));
      if (format == "csv") {
        std::cout << io::to_csv(res.table);
      } else {
        emit(io::encode(res.table));
      }
      return 0;
    }
    if (measures->parsed()) {
      const ConditionalResult res =
          conditional_probs(load_channel(in_channel), load_state(in_state));
      emit(io::encode(summarize(res.table, parse_base(base))));
      return 0;
    }
    if (chain_cmd->parsed()) {
      const LogBase b = parse_base(chain_base);
      const TwoStepProcess proc =
          build_two_step(load_state(chain_state), load_channel(chain_stage1),
                         load_channel(chain_stage2));
      const HolevoResult hol = holevo_bound_check(proc, b);
      if (chain_format == "csv") {
        std::cout << "table,rq\r\n" << io::to_csv(proc.table_rq.probs)
                  << "table,sr\r\n" << io::to_csv(proc.table_sr.probs)
                  << "table,sq\r\n" << io::to_csv(proc.table_sq.probs);
        return 0;
      }
      json doc = {{"version", io::kSchemaVersion},
                  {"seed", chain_seed},
                  {"base", io::encode_base(b)},
                  {"tables",
                   {{"rq", io::encode(proc.table_rq)},
                    {"sr", io::encode(proc.table_sr)},
                    {"sq", io::encode(proc.table_sq)}}},
                  {"I_RQ", hol.i_rq},
                  {"I_SQ", hol.i_sq},
                  {"chi", hol.chi},
                  {"residuals",
                   {{"chain", proc.chain_residual},
                    {"raw_chain", proc.raw_chain_residual},
                    {"total_prob_sr", proc.total_prob_sr},
                    {"total_prob_sq", proc.total_prob_sq},
                    {"holevo_equality", hol.equality_residual},
                    {"dpi_slack", hol.i_rq - hol.i_sq}}}};
      if (chain_samples > 0) {
        const TrajectoryBatch batch =
            sample_trajectories(proc, chain_samples, chain_seed);
        const EmpiricalTable emp = empirical_table(batch);
        doc["empirical"] = {
            {"samples", chain_samples},
            {"table_rq", io::encode(emp.table)},
            {"max_sigma_deviation",
             max_binomial_sigma_deviation(emp, proc.table_rq)},
            {"low_sample_columns", emp.low_sample_columns}};
      }
      emit(doc);
      return 0;
    }
    if (subsys_cmd->parsed()) {
      if (subsys_which != "A" && subsys_which != "B")
        throw Error("--which must be A or B");
      const LogBase b = parse_base(subsys_base);
      const ParentChild pc = subsystem_conditional(
          load_state(subsys_state), subsys_dims[0], subsys_dims[1],
          subsys_which == "A" ? Subsystem::A : Subsystem::B);
      const ParentConditionalEntropy j = j_given_parent(pc, b);
      const EntanglementBound bound = entanglement_bound_check(pc, b);
      emit({{"version", io::kSchemaVersion},
            {"dims", subsys_dims},
            {"which", subsys_which},
            {"base", io::encode_base(b)},
            {"p_am", io::encode(pc.table)},
            {"J_per_m", j.per_m},
            {"J_A_given_AB", j.total},
            {"S_B_given_A", -bound.lhs},
            {"bound_slack", bound.slack}});
      return 0;
    }
    if (gen_cmd->parsed()) {
      const DensityMatrix rho = load_state(gen_state);
      const QuantumChannel e = load_channel(gen_channel);
      const DensityMatrix rho_R = apply(e, rho);
      const ConvexDecomposition dec_in =
          random_decomposition(rho, gen_members, gen_seed);
      const ConvexDecomposition dec_out =
          random_decomposition(rho_R, gen_members, Rng::derive(gen_seed, 1));
      const GeneralizedTable against_basis =
          generalized_qcp(e, dec_in, rho_R.spectral().basis());
      const GeneralizedTable against_decomposition =
          generalized_qcp(e, dec_in, dec_out);
      emit({{"version", io::kSchemaVersion},
            {"seed", gen_seed},
            {"members", gen_members},
            {"orthobasis_table", encode_generalized(against_basis)},
            {"decomposition_table", encode_generalized(against_decomposition)}});
      return 0;
    }
    if (verify_cmd->parsed()) {
      if (!reproduce_check.empty()) {
        if (!have_reproduce_seed) throw Error("--reproduce-seed is required");
        emit(io::encode(reproduce(cfg, reproduce_seed, reproduce_check)));
        return 0;
      }
      const VerificationReport report = run_suite(cfg);
      if (verify_format == "csv") {
        std::cout << io::to_csv(report);
      } else {
        emit(io::encode(report));
      }
      std::size_t failures = 0;
      for (const auto& c : report.checks) failures += c.failures;
      std::cerr << "verify: " << cfg.n_trials << " trials, " << failures
                << " failing check evaluations, "
                << (report.pass ? "PASS" : "FAIL") << "\n";
      return report.pass ? 0 : 1;
    }
    if (demo_cmd->parsed()) return run_demo(demo_name);
  } catch (const Error& e) {
    std::cerr << "qcond: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "qcond: no subcommand executed\n";
  return 2;
}
