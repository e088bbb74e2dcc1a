// tmcc: command-line driver for the TMCC key-distribution simulator.
//
//   tmcc dist     --lambda L [--n-max N]
//   tmcc moments  --lambda 0.5,1,2 | --grid 0.1:10:0.1
//   tmcc session  [--lambda --epsilon --bits --seed --attack --significance]
//                 [--transport loopback|tcp --role alice|bob --listen|--connect host:port]
//   tmcc sweep    --lambda ... --epsilon ... [--bits-per-cell N --seed S]
//
// Every command takes --format csv|json, --output PATH and --config PATH. The
// config file holds key=value lines named after the long flags; flags given
// on the command line win.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tmcc/detection.hpp"
#include "tmcc/protocol.hpp"
#include "tmcc/session.hpp"
#include "tmcc/tcp_transport.hpp"
#include "tmcc/transcript_io.hpp"

namespace {

using namespace tmcc;

// Exit codes.
constexpr int kExitAccepted = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitVerification = 3;
constexpr int kExitEavesdropping = 4;
constexpr int kExitTransport = 5;
constexpr int kExitProtocol = 6;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int exit_code_for(const SessionOutcome& outcome) {
  if (outcome.accepted) return kExitAccepted;
  switch (*outcome.reason) {
    case AbortReason::transport: return kExitTransport;
    case AbortReason::protocol_violation: return kExitProtocol;
    case AbortReason::verification: return kExitVerification;
    case AbortReason::eavesdropping_suspected: return kExitEavesdropping;
  }
  return kExitInternal;
}

double parse_real(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw UsageError("not a number: '" + text + "'");
  return value;
}

// "start:stop:step", inclusive of stop up to rounding.
std::vector<double> expand_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw UsageError("grid must be start:stop:step, got '" + text + "'");
  const double start = parse_real(parts[0]);
  const double stop = parse_real(parts[1]);
  const double step = parse_real(parts[2]);
  if (!(step > 0.0) || stop < start) throw UsageError("grid needs step > 0 and stop >= start");
  std::vector<double> values;
  for (long i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v > stop + 1e-9 * std::max(1.0, std::abs(stop))) break;
    values.push_back(v);
  }
  return values;
}

std::vector<double> lambda_list(const std::vector<double>& listed, const std::string& grid) {
  std::vector<double> values = listed;
  if (!grid.empty()) {
    const auto expanded = expand_grid(grid);
    values.insert(values.end(), expanded.begin(), expanded.end());
  }
  if (values.empty()) throw UsageError("empty lambda grid");
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw UsageError("lambda values must be finite and nonnegative");
  }
  return values;
}

struct Output {
  std::string format = "csv";
  std::string path;

  OutputFormat parsed() const {
    try {
      return parse_output_format(format);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  template <class Writer>
  void emit(Writer write) const {
    if (path.empty()) {
      write(std::cout);
      return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw UsageError("cannot open " + path + " for writing");
    write(file);
  }
};

void add_output_flags(CLI::App* cmd, Output& out) {
  cmd->add_option("--format", out.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("-o,--output", out.path, "write to this file instead of stdout");
}

// ---------------------------------------------------------------------------
// dist

struct DistArgs {
  double lambda = -1.0;
  std::optional<std::size_t> n_max;
  Output out;
};

int run_dist(const DistArgs& args) {
  if (!std::isfinite(args.lambda) || args.lambda < 0.0) throw UsageError("--lambda must be finite and >= 0");
  TruncationPolicy policy;
  policy.fixed_n_max = args.n_max;
  const Amplitude lambda(args.lambda);
  const auto tmcc = tmcc_pmf(lambda, policy);
  const auto poisson = poisson_pmf(tmcc.mean(), policy);

  std::size_t last = std::max(tmcc.n_max(), poisson.n_max());
  while (last > 0 && tmcc.probability(last) == 0.0 && poisson.probability(last) == 0.0) --last;

  Table table;
  table.columns = {"n", "p_tmcc", "p_poisson"};
  for (std::size_t n = 0; n <= last; ++n) {
    table.rows.push_back({static_cast<std::int64_t>(n), tmcc.probability(n), poisson.probability(n)});
  }
  args.out.emit([&](std::ostream& os) { write_table(os, table, args.out.parsed()); });
  return kExitAccepted;
}

// ---------------------------------------------------------------------------
// moments

struct MomentsArgs {
  std::vector<double> lambdas;
  std::string grid;
  Output out;
};

int run_moments(const MomentsArgs& args) {
  Table table;
  table.columns = {"lambda", "mean", "variance", "poisson_variance"};
  for (double value : lambda_list(args.lambdas, args.grid)) {
    const Amplitude lambda(value);
    const double mean = mean_photons(lambda);
    table.rows.push_back({value, mean, variance(lambda), mean});
  }
  args.out.emit([&](std::ostream& os) { write_table(os, table, args.out.parsed()); });
  return kExitAccepted;
}

// ---------------------------------------------------------------------------
// session

struct SessionArgs {
  double lambda = 2.0;
  double epsilon = 0.0;
  std::size_t bits = 1024;
  std::uint64_t seed = 1;
  std::string attack = "none";
  double significance = kDefaultSignificance;
  std::string transport = "loopback";
  std::string role;
  std::string listen;
  std::string connect;
  std::string port_file;
  double timeout = 30.0;
  std::string transcript;
  Output out;
};

SessionConfig make_config(const SessionArgs& args) {
  SessionConfig config;
  try {
    config.lambda = Amplitude(args.lambda);
    config.epsilon = args.epsilon;
    config.key_bits = args.bits;
    config.seed = args.seed;
    config.detection_significance = args.significance;
    config.attack = AttackModel::parse(args.attack);
    config.validate();
  } catch (const std::logic_error& e) {
    throw UsageError(e.what());
  }
  return config;
}

SessionTranscript run_tcp(const SessionArgs& args, const SessionConfig& config) {
  if (args.role != "alice" && args.role != "bob") throw UsageError("--transport tcp needs --role alice|bob");
  if (args.listen.empty() == args.connect.empty()) {
    throw UsageError("--transport tcp needs exactly one of --listen or --connect");
  }
  const auto timeout = std::chrono::milliseconds(static_cast<long>(args.timeout * 1000));
  std::optional<TcpStream> stream;
  try {
    if (!args.listen.empty()) {
      const auto [host, port] = parse_endpoint(args.listen);
      TcpListener listener(host, port);
      if (!args.port_file.empty()) {
        const std::string tmp = args.port_file + ".tmp";
        std::ofstream(tmp) << listener.port() << '\n';
        std::rename(tmp.c_str(), args.port_file.c_str());
      }
      stream.emplace(listener.accept(timeout));
    } else {
      const auto [host, port] = parse_endpoint(args.connect);
      stream.emplace(TcpStream::connect(host, port, timeout));
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const TransportError& e) {
    SessionTranscript failed;
    failed.config = config;
    failed.session_id = session_id_for_seed(config.seed);
    failed.threshold = decision_threshold(config.lambda);
    failed.outcome.reason = AbortReason::transport;
    failed.outcome.detail = e.what();
    return failed;
  }
  return args.role == "alice" ? run_alice(config, *stream) : run_bob(config, *stream);
}

int run_session_cmd(const SessionArgs& args) {
  const SessionConfig config = make_config(args);
  SessionTranscript transcript;
  if (args.transport == "loopback") {
    if (!args.role.empty() || !args.listen.empty() || !args.connect.empty()) {
      throw UsageError("--role, --listen and --connect only apply to --transport tcp");
    }
    transcript = run_session(config);
  } else {
    transcript = run_tcp(args, config);
  }

  const auto format = args.out.parsed();
  if (!args.transcript.empty()) {
    std::ofstream file(args.transcript, std::ios::binary);
    if (!file) throw UsageError("cannot open " + args.transcript + " for writing");
    write_transcript(file, transcript, format);
  }
  args.out.emit([&](std::ostream& os) { write_summary(os, transcript_summary(transcript), format); });
  if (!transcript.outcome.accepted) {
    std::cerr << "session aborted: " << to_string(*transcript.outcome.reason) << " ("
              << transcript.outcome.detail << ")\n";
  }
  return exit_code_for(transcript.outcome);
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::vector<double> lambdas;
  std::string grid;
  std::vector<double> epsilons;
  std::size_t bits_per_cell = 100'000;
  std::uint64_t seed = 1;
  Output out;
};

int run_sweep(const SweepArgs& args) {
  const auto lambdas = lambda_list(args.lambdas, args.grid);
  if (args.epsilons.empty()) throw UsageError("empty epsilon grid");
  for (double eps : args.epsilons) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw UsageError("epsilon values must lie in [0, 1]");
  }
  if (args.bits_per_cell == 0) throw UsageError("--bits-per-cell must be positive");

  Table table;
  table.columns = {"lambda", "epsilon", "threshold", "prob_zero", "error_factor", "error_probability",
                   "empirical_conditional_error", "empirical_mismatch_rate", "predicted_mismatch_rate"};
  const CounterRng cell_seeds(args.seed);
  std::uint64_t cell = 0;
  for (double value : lambdas) {
    const Amplitude lambda(value);
    const auto threshold = decision_threshold(lambda);
    for (double eps : args.epsilons) {
      const TmccSource source(lambda, cell_seeds.bits(cell++, 0));
      const NoiseModel noise(eps);
      std::uint64_t alice_zero = 0, flipped = 0, mismatched = 0;
      for (std::size_t i = 0; i < args.bits_per_cell; ++i) {
        const auto pair = source.pair_at(i, noise);
        const auto a = decide_bit(pair.alice_count, threshold);
        const auto b = decide_bit(pair.bob_count, threshold);
        if (a == 0) {
          ++alice_zero;
          flipped += b;
        }
        mismatched += a != b;
      }
      table.rows.push_back({value, eps, std::int64_t{threshold}, prob_zero(lambda), error_factor(lambda),
                            error_probability(lambda, eps),
                            alice_zero ? Cell(double(flipped) / double(alice_zero)) : Cell(),
                            double(mismatched) / double(args.bits_per_cell), mismatch_rate(lambda, eps)});
    }
  }
  args.out.emit([&](std::ostream& os) { write_table(os, table, args.out.parsed()); });
  return kExitAccepted;
}

// ---------------------------------------------------------------------------
// config file

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Appends --key value for every config entry whose flag is absent from argv.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream file(path);
  if (!file) throw UsageError("cannot read config file " + path);
  std::vector<std::string> extra;
  int line_no = 0;
  for (std::string line; std::getline(file, line);) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string flag = "--" + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for TMCC-beam quantum key distribution"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  app.add_option("--config", "key=value file supplying defaults for the subcommand flags");

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "Photon-number pmf of a TMCC beam and the Poisson beam of equal mean");
  dist_cmd->add_option("--lambda", dist.lambda, "field amplitude |lambda|")->required();
  dist_cmd->add_option("--n-max", dist.n_max, "fixed truncation instead of the 1e-12 tail rule");
  add_output_flags(dist_cmd, dist.out);

  MomentsArgs moments;
  auto* moments_cmd = app.add_subcommand("moments", "Mean and variance against amplitude, with the Poisson reference");
  moments_cmd->add_option("--lambda", moments.lambdas, "comma-separated amplitudes")->delimiter(',');
  moments_cmd->add_option("--grid", moments.grid, "start:stop:step amplitude grid");
  add_output_flags(moments_cmd, moments.out);

  SessionArgs session;
  auto* session_cmd = app.add_subcommand("session", "Run one key-distribution session");
  session_cmd->add_option("--lambda", session.lambda, "field amplitude |lambda|");
  session_cmd->add_option("--epsilon", session.epsilon, "noise-photon probability per mode and bit");
  session_cmd->add_option("--bits", session.bits, "key length (even)");
  session_cmd->add_option("--seed", session.seed, "seed of the shared source simulation");
  session_cmd->add_option("--attack", session.attack, "none | beam_split[:t] | clone[:poisson|:tmcc]");
  session_cmd->add_option("--significance", session.significance, "distribution-test significance");
  session_cmd->add_option("--transport", session.transport, "loopback or tcp")
      ->check(CLI::IsMember({"loopback", "tcp"}));
  session_cmd->add_option("--role", session.role, "alice or bob (tcp only)");
  session_cmd->add_option("--listen", session.listen, "host:port to accept the peer on (tcp only)");
  session_cmd->add_option("--connect", session.connect, "host:port of the listening peer (tcp only)");
  session_cmd->add_option("--port-file", session.port_file, "write the bound listening port here");
  session_cmd->add_option("--timeout", session.timeout, "seconds to wait for the peer");
  session_cmd->add_option("--transcript", session.transcript, "write the per-bit transcript here");
  add_output_flags(session_cmd, session.out);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Analytic and simulated error rates over a lambda x epsilon grid");
  sweep_cmd->add_option("--lambda", sweep.lambdas, "comma-separated amplitudes")->delimiter(',');
  sweep_cmd->add_option("--grid", sweep.grid, "start:stop:step amplitude grid");
  sweep_cmd->add_option("--epsilon", sweep.epsilons, "comma-separated noise factors")->delimiter(',');
  sweep_cmd->add_option("--bits-per-cell", sweep.bits_per_cell, "simulated bits per grid cell");
  sweep_cmd->add_option("--seed", sweep.seed, "base seed");
  add_output_flags(sweep_cmd, sweep.out);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (*dist_cmd) return run_dist(dist);
    if (*moments_cmd) return run_moments(moments);
    if (*session_cmd) return run_session_cmd(session);
    if (*sweep_cmd) return run_sweep(sweep);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "tmcc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "tmcc: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
