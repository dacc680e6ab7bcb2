#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "rkam/fourier_field.hpp"
#include "rkam/kam.hpp"
#include "rkam/lienard.hpp"

namespace rkam {

using Json = nlohmann::ordered_json;

const char* version_string();

// Shortest decimal that reads back to the same double; always '.'.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
// Writes through a temporary file and renames it into place.
void write_text_file(const std::string& path, const std::string& content);
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// Parses text, reporting line and column on failure. `what` names the
// document in messages.
Json parse_json(const std::string& text, const std::string& what);
std::string dump_json(const Json& j);  // 2-space indent, trailing newline

// Reads an object while tracking consumed keys; finish() rejects the rest.
class StrictObject {
 public:
  StrictObject(const Json& j, std::string context);

  bool has(const std::string& key) const;
  const Json& at(const std::string& key);
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  int integer(const std::string& key);
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  void finish() const;
  const std::string& context() const { return ctx_; }

 private:
  const Json& j_;
  std::string ctx_;
  std::set<std::string> used_;
};

// {d, m, N, q_y, r, parity, autonomous, coeffs: [{power, l, k, comp, re, im}]}
// with nonzero coefficients in (power, l, k, comp) order; power is the
// exponent vector of the action monomial.
Json field_to_json(const FourierField& f);
// Throws ParseError on malformed input and ValidationError when the
// coefficients break reality or the declared parity.
FourierField field_from_json(const Json& j, const std::string& context = "field");

Json embedding_to_json(const TorusEmbedding& e);
TorusEmbedding embedding_from_json(const Json& j, const std::string& context = "embedding");
void save_embedding(const std::string& path, const TorusEmbedding& e);
TorusEmbedding load_embedding(const std::string& path);

// m,cutoff,sup_f,sup_g,min_divisor,inversion_iters,invariance_residual
std::string convergence_csv(const ConvergenceReport& rep);
// orbit,level,theta,x0,y0,reference_norm,max_norm,ratio,energy_drift,steps,status
std::string stability_csv(const StabilityReport& rep);

struct RunManifest {
  Json config;
  std::string version = version_string();
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::map<std::string, std::string> digests;  // file name -> SHA-256 hex
};

Json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);
// Names of files in dir whose digest no longer matches the manifest.
std::vector<std::string> check_digests(const RunManifest& m, const std::string& dir);

}  // namespace rkam
