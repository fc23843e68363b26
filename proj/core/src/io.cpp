#include "wknn/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wknn/error.hpp"

namespace wknn {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string weight_csv(const WeightVector& w) {
  std::string out = "i,w\n";
  for (std::size_t i = 0; i < w.w.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += format_number(w.w[i]);
    out += '\n';
  }
  return out;
}

void write_weight_csv(const WeightVector& w, const std::string& path) {
  write_text_file(path, weight_csv(w));
}

WeightVector read_weight_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  WeightVector v;
  v.scheme = WeightScheme::custom;
  std::string line;
  std::size_t expected = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      throw input_error(path + ": weight rows must be 'i,w'");
    }
    try {
      const std::size_t i = static_cast<std::size_t>(std::stoull(a));
      if (i != expected) throw input_error(path + ": weight indices must run 1..n");
      v.w.push_back(std::stod(b));
      ++expected;
    } catch (const input_error&) {
      throw;
    } catch (const std::exception&) {
      if (expected == 1) continue; // header row
      throw input_error(path + ": malformed weight row '" + line + "'");
    }
  }
  if (v.w.empty()) throw input_error(path + ": no weights found");
  v.n = v.w.size();
  return v;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw input_error("failed while writing '" + path + "'");
}

} // namespace wknn
