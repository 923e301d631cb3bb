#include "tailest/io.hpp"

#include "tailest/rng.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tailest {

namespace {

void io_fail(const std::string& msg) { throw std::runtime_error(msg); }

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string fmt_g17(scalar_t value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_dataset(std::ostream& os, const Dataset& data) {
  os << "# seed=" << (data.external ? std::string("external") : std::to_string(data.seed))
     << " model=" << (data.model.empty() ? std::string("unknown") : data.model)
     << " rng=" << Xoshiro256pp::kName << "\n";
  for (index_t i = 0; i < data.values.size(); ++i) {
    os << fmt_g17(data.values[i]) << "\n";
  }
}

void write_dataset_file(const std::string& path, const Dataset& data) {
  std::ostringstream os;
  write_dataset(os, data);
  write_text_file(path, os.str());
}

Dataset read_dataset(std::istream& is, const std::string& origin) {
  Dataset data;
  data.external = true;
  std::vector<scalar_t> values;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      // Provenance header: "# seed=<u64|external> model=<canonical> ..."
      std::istringstream hs(body.substr(1));
      std::string token;
      while (hs >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "seed" && value != "external") {
          data.seed = std::stoull(value);
          data.external = false;
        } else if (key == "model" && value != "unknown") {
          data.model = value;
        }
      }
      continue;
    }
    scalar_t v = 0.0;
    const auto* first = body.data();
    const auto* last = body.data() + body.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      io_fail(origin + ": line " + std::to_string(line_no) + ": cannot parse value '" + body +
              "'");
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
      io_fail(origin + ": line " + std::to_string(line_no) +
              ": values must be positive finite numbers, got '" + body + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) io_fail(origin + ": dataset is empty");
  data.values = Eigen::Map<const array_t>(values.data(), static_cast<index_t>(values.size()));
  return data;
}

Dataset read_dataset_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) io_fail("cannot open dataset file '" + path + "'");
  return read_dataset(is, path);
}

std::string report_csv_header() { return "method,k_or_params,alpha_hat,n,seed,diagnostics"; }

std::string report_csv_row(const EstimateReport& report) {
  std::ostringstream os;
  os << method_name(report.method) << "," << report.k_or_params << ","
     << fmt_g17(report.alpha_hat) << "," << report.n << "," << report.seed << ",";
  bool first = true;
  for (const auto& [key, value] : report.diagnostics) {
    if (!first) os << ";";
    os << key << "=" << fmt_g17(value);
    first = false;
  }
  return os.str();
}

std::string trace_csv_header() { return "k,k_prime,alpha_k,alpha_kprime,abs_diff,bound,pass"; }

std::string trace_csv_row(const ComparisonRecord& rec) {
  std::ostringstream os;
  os << rec.k << "," << rec.k_prime << "," << fmt_g17(rec.alpha_k) << ","
     << fmt_g17(rec.alpha_kprime) << "," << fmt_g17(rec.abs_diff) << "," << fmt_g17(rec.bound)
     << "," << (rec.pass ? 1 : 0);
  return os.str();
}

void write_trace_csv(std::ostream& os, const std::vector<ComparisonRecord>& trace) {
  os << trace_csv_header() << "\n";
  for (const auto& rec : trace) os << trace_csv_row(rec) << "\n";
}

std::string trials_csv_header() {
  return "n,trial,seed,method,alpha_hat,abs_error,k_or_params,flags";
}

std::string trials_csv_row(const TrialRecord& rec) {
  std::ostringstream os;
  os << rec.n << "," << rec.trial << "," << rec.seed << "," << rec.method << ","
     << fmt_g17(rec.alpha_hat) << "," << fmt_g17(rec.abs_error) << "," << rec.k_or_params << ","
     << rec.flags;
  return os.str();
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << trials_csv_header() << "\n";
  for (const auto& rec : records) os << trials_csv_row(rec) << "\n";
}

std::vector<TrialRecord> read_trials_csv(std::istream& is) {
  std::vector<TrialRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body == trials_csv_header()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(body);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 8) {
      io_fail("trials csv: line " + std::to_string(line_no) + ": expected 8 fields");
    }
    TrialRecord rec;
    rec.n = std::stoll(fields[0]);
    rec.trial = std::stoi(fields[1]);
    rec.seed = std::stoull(fields[2]);
    rec.method = fields[3];
    rec.alpha_hat = fields[4] == "nan" ? std::nan("") : std::stod(fields[4]);
    rec.abs_error = fields[5] == "nan" ? std::nan("") : std::stod(fields[5]);
    rec.k_or_params = fields[6];
    rec.flags = fields[7];
    rec.failed = rec.flags != "ok";
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<TrialRecord> read_trials_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) io_fail("cannot open trials file '" + path + "'");
  return read_trials_csv(is);
}

std::string summary_csv_header() { return "n,method,median_error,q25,q75,fail_count"; }

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << summary_csv_header() << "\n";
  for (const auto& row : rows) {
    os << row.n << "," << row.method << "," << fmt_g17(row.median_error) << ","
       << fmt_g17(row.q25) << "," << fmt_g17(row.q75) << "," << row.fail_count << "\n";
  }
}

std::string rates_csv_header() { return "method,slope,intercept,r_squared"; }

void write_rates_csv(std::ostream& os,
                     const std::vector<std::pair<std::string, RateFit>>& fits) {
  os << rates_csv_header() << "\n";
  for (const auto& [method, fit] : fits) {
    os << method << "," << fmt_g17(fit.slope) << "," << fmt_g17(fit.intercept) << ","
       << fmt_g17(fit.r_squared) << "\n";
  }
}

void write_family_csv(std::ostream& os, const LowerBoundFamily& family) {
  os << "i,beta_i,gamma_i,K_i,t_i,alpha_i\n";
  for (const auto& mem : family.members) {
    os << mem.i << "," << fmt_g17(mem.beta_i) << "," << fmt_g17(mem.gamma_i) << ","
       << fmt_g17(mem.K_i) << "," << fmt_g17(mem.t_i) << "," << fmt_g17(mem.alpha_i) << "\n";
  }
}

void write_fano_csv(std::ostream& os, const FanoReport& report) {
  os << "M,upsilon,avg_kl_term,fano_lower_bound\n";
  os << report.M << "," << fmt_g17(report.upsilon) << "," << fmt_g17(report.avg_kl_term) << ","
     << fmt_g17(report.prob_lower) << "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) io_fail("cannot open '" + path + "' for writing");
  os << content;
  if (!os) io_fail("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) io_fail("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace tailest
