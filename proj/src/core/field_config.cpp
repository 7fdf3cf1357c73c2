#include "emscat/field_config.hpp"

#include "emscat/errors.hpp"

namespace emscat {

namespace {

std::vector<double> read_vector(const Config& cfg, const std::string& key, int d, bool required) {
  if (!required && !cfg.has(key)) return {};
  std::vector<double> v = cfg.get_doubles(key);
  if (static_cast<int>(v.size()) != d)
    fail(ErrorCode::Parse, "key '" + key + "': expected " + std::to_string(d) + " components, got " +
                               std::to_string(v.size()));
  return v;
}

Vec to_vec(const std::vector<double>& v, int d) {
  if (v.empty()) return Vec::Zero(d);
  Vec out(d);
  for (int i = 0; i < d; ++i) out(i) = v[i];
  return out;
}

}  // namespace

FieldSpec read_field_spec(const Config& cfg, const std::string& prefix, int d) {
  FieldSpec s;
  s.d = d;
  const std::string p = prefix + ".";
  s.family = cfg.get_string(p + "family");
  if (s.family == "zero") {
    s.alpha = cfg.get_double(p + "alpha", 2.0);
  } else if (s.family == "inverse-power") {
    s.v0 = cfg.get_double(p + "v0");
    s.alpha = cfg.get_double(p + "alpha", 2.0);
    s.center = read_vector(cfg, p + "center", d, false);
  } else if (s.family == "gaussian") {
    s.v0 = cfg.get_double(p + "v0");
    s.w = cfg.get_double(p + "w", 1.0);
    s.alpha = cfg.get_double(p + "alpha", 2.0);
    s.center = read_vector(cfg, p + "center", d, false);
  } else if (s.family == "radial-magnetic") {
    if (d != 2) fail(ErrorCode::Parse, "key '" + p + "family': radial-magnetic needs d = 2");
    s.b0 = cfg.get_double(p + "b0");
    s.sigma = cfg.get_double(p + "sigma", 2.0);
  } else if (s.family == "localized-magnetic") {
    s.b0 = cfg.get_double(p + "b0");
    s.moment = read_vector(cfg, p + "moment", d, true);
    s.center = read_vector(cfg, p + "center", d, false);
    s.profile = cfg.get_string(p + "profile", "power");
    if (s.profile == "power") {
      s.kappa = cfg.get_double(p + "kappa", 1.5);
    } else if (s.profile == "gaussian") {
      s.w = cfg.get_double(p + "w", 1.0);
      s.alpha = cfg.get_double(p + "alpha", 3.0);
    } else {
      fail(ErrorCode::Parse, "key '" + p + "profile': expected power or gaussian, got '" + s.profile + "'");
    }
  } else if (s.family == "sum") {
    const long long n = cfg.get_int(p + "parts");
    if (n < 1 || n > 64) fail(ErrorCode::Parse, "key '" + p + "parts': expected 1..64 components");
    for (long long k = 1; k <= n; ++k) s.parts.push_back(read_field_spec(cfg, p + "part" + std::to_string(k), d));
  } else {
    fail(ErrorCode::Parse, "key '" + p + "family': unknown field family '" + s.family + "'");
  }
  return s;
}

void write_field_spec(Config& cfg, const std::string& prefix, const FieldSpec& s) {
  const std::string p = prefix + ".";
  cfg.set(p + "family", s.family);
  if (s.family == "zero") {
    cfg.set(p + "alpha", s.alpha);
  } else if (s.family == "inverse-power") {
    cfg.set(p + "v0", s.v0);
    cfg.set(p + "alpha", s.alpha);
    if (!s.center.empty()) cfg.set(p + "center", s.center);
  } else if (s.family == "gaussian") {
    cfg.set(p + "v0", s.v0);
    cfg.set(p + "w", s.w);
    cfg.set(p + "alpha", s.alpha);
    if (!s.center.empty()) cfg.set(p + "center", s.center);
  } else if (s.family == "radial-magnetic") {
    cfg.set(p + "b0", s.b0);
    cfg.set(p + "sigma", s.sigma);
  } else if (s.family == "localized-magnetic") {
    cfg.set(p + "b0", s.b0);
    cfg.set(p + "moment", s.moment);
    if (!s.center.empty()) cfg.set(p + "center", s.center);
    cfg.set(p + "profile", s.profile);
    if (s.profile == "power") {
      cfg.set(p + "kappa", s.kappa);
    } else {
      cfg.set(p + "w", s.w);
      cfg.set(p + "alpha", s.alpha);
    }
  } else if (s.family == "sum") {
    cfg.set(p + "parts", static_cast<long long>(s.parts.size()));
    for (std::size_t k = 0; k < s.parts.size(); ++k)
      write_field_spec(cfg, p + "part" + std::to_string(k + 1), s.parts[k]);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown field family '" + s.family + "'");
  }
}

FieldPtr build_field(const FieldSpec& s) {
  const int d = s.d;
  if (s.family == "zero") return make_zero_field(d, s.alpha);
  if (s.family == "inverse-power") return make_inverse_power_field(d, s.v0, s.alpha, to_vec(s.center, d));
  if (s.family == "gaussian") return make_gaussian_field(d, s.v0, s.w, s.alpha, to_vec(s.center, d));
  if (s.family == "radial-magnetic") return make_radial_magnetic_field(s.b0, s.sigma);
  if (s.family == "localized-magnetic") {
    LocalizedMagneticSpec m;
    m.d = d;
    m.b0 = s.b0;
    m.moment = to_vec(s.moment, d);
    m.center = to_vec(s.center, d);
    m.profile = s.profile == "gaussian" ? Profile::Gaussian : Profile::Power;
    m.kappa = s.kappa;
    m.width = s.w;
    m.alpha = s.alpha;
    return make_localized_magnetic_field(m);
  }
  if (s.family == "sum") {
    std::vector<FieldPtr> parts;
    for (const FieldSpec& p : s.parts) parts.push_back(build_field(p));
    return make_sum_field(parts);
  }
  fail(ErrorCode::InvalidArgument, "unknown field family '" + s.family + "'");
}

}  // namespace emscat
