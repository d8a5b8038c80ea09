#include "fscap/app/sweep.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "fscap/app/methods.hpp"
#include "fscap/error.hpp"
#include "fscap/io.hpp"

namespace fscap::app {

namespace {

double parse_double(std::string_view text, const std::string& context) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidArgument("bad number '" + std::string(text) + "' in " + context);
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const auto a = text.find(':'), b = text.find(':', a + 1);
    if (b == std::string::npos || text.find(':', b + 1) != std::string::npos)
      throw InvalidArgument("grid range must look like start:stop:step, got '" + text + "'");
    const double start = parse_double(std::string_view(text).substr(0, a), "grid");
    const double stop = parse_double(std::string_view(text).substr(a + 1, b - a - 1), "grid");
    const double step = parse_double(std::string_view(text).substr(b + 1), "grid");
    if (!(step > 0.0)) throw InvalidArgument("grid step must be positive");
    if (stop < start) throw InvalidArgument("grid stop is below its start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) grid.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    return grid;
  }
  std::size_t pos = 0;
  while (pos <= text.size() && !text.empty()) {
    const auto next = std::min(text.find(',', pos), text.size());
    grid.push_back(parse_double(std::string_view(text).substr(pos, next - pos), "grid"));
    pos = next + 1;
  }
  return grid;
}

void validate(const SweepSpec& spec) {
  if (spec.channel != "trapdoor" && spec.channel != "bsc-rll" && spec.channel != "dec")
    throw InvalidArgument("unknown channel family '" + spec.channel + "'");
  if (spec.delay < 1) throw InvalidArgument("delay must be at least 1");
  if (spec.grid.empty()) throw InvalidArgument("sweep grid is empty");
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    if (!std::isfinite(spec.grid[i])) throw InvalidArgument("sweep grid holds a non-finite value");
    if (i > 0 && !(spec.grid[i] > spec.grid[i - 1])) throw InvalidArgument("sweep grid must be strictly increasing");
  }
  if (spec.methods.empty()) throw InvalidArgument("sweep needs at least one method");
  for (const auto& m : spec.methods) parse_method(m, spec.qgraph.empty() ? "" : spec.qgraph, spec.delay);
  if (spec.jobs < 1) throw InvalidArgument("jobs must be at least 1");
}

unsigned default_jobs() {
  const char* env = std::getenv("FSCAP_JOBS");
  if (!env) return 1;
  unsigned v = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return (ec == std::errc() && ptr == s.data() + s.size() && v > 0) ? v : 1;
}

std::string to_json(const SweepSpec& spec) {
  nlohmann::json j = {{"channel", spec.channel},   {"delay", spec.delay},
                      {"grid", spec.grid},         {"methods", spec.methods},
                      {"qgraph", spec.qgraph},     {"seed", spec.seed},
                      {"random_starts", spec.random_starts}, {"jobs", spec.jobs},
                      {"csv", spec.csv_path},      {"manifest", spec.manifest_path}};
  return j.dump(2);
}

SweepSpec sweep_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("malformed sweep config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("sweep config must be a JSON object");
  SweepSpec spec;
  try {
    spec.channel = j.value("channel", spec.channel);
    spec.delay = j.value("delay", spec.delay);
    if (j.contains("grid")) spec.grid = j["grid"].is_string() ? parse_grid(j["grid"].get<std::string>()) : j["grid"].get<std::vector<double>>();
    spec.methods = j.value("methods", spec.methods);
    spec.qgraph = j.value("qgraph", spec.qgraph);
    spec.seed = j.value("seed", spec.seed);
    spec.random_starts = j.value("random_starts", spec.random_starts);
    spec.jobs = j.value("jobs", spec.jobs);
    spec.csv_path = j.value("csv", spec.csv_path);
    spec.manifest_path = j.value("manifest", spec.manifest_path);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad sweep config field: ") + e.what());
  }
  return spec;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  char runtime[32];
  for (const auto& r : rows) {
    std::snprintf(runtime, sizeof runtime, "%.3f", r.runtime_ms);
    out << io::format_value(r.param) << ',' << csv_field(r.method) << ',' << io::format_value(r.value) << ','
        << io::format_value(r.residual) << ',' << r.iterations << ',' << runtime << ',' << csv_field(r.status) << '\n';
  }
  return out.str();
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate(spec);
  std::vector<MethodSpec> methods;
  for (const auto& m : spec.methods) methods.push_back(parse_method(m, spec.qgraph, spec.delay));

  const std::size_t total = spec.grid.size() * methods.size();
  SweepResult result;
  result.rows.resize(total);
  MethodOptions opts{spec.seed, spec.random_starts};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) {
      const double p = spec.grid[i / methods.size()];
      const auto& m = methods[i % methods.size()];
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = evaluate_method(spec.channel, p, m, opts);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      result.rows[i] = {p, m.name, r.value, r.residual, r.iterations, ms, r.status};
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(total)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  auto& man = result.manifest;
  man.tool_version = tool_version();
  man.config = to_json(spec);
  man.seeds = {spec.seed};
  man.input_hash = git_blob_hash(man.config);
  for (std::size_t i = 0; i < total; ++i)
    man.tasks.push_back({"p=" + io::format_value(result.rows[i].param) + "/" + result.rows[i].method, i, result.rows[i].runtime_ms});

  if (!spec.csv_path.empty()) io::write_file(spec.csv_path, to_csv(result.rows));
  if (!spec.manifest_path.empty()) io::write_file(spec.manifest_path, to_json(man));
  return result;
}

}  // namespace fscap::app
