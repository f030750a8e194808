#include "cuspfit/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cuspfit {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

bool is_blank_or_comment(const std::string& line) {
  for (char ch : line) {
    if (ch == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& tok, const std::string& path,
                    long line) {
  double value = 0.0;
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  const auto res = std::from_chars(b, e, value);
  if (res.ec != std::errc{} || res.ptr != e || !std::isfinite(value))
    throw ParseError("invalid number '" + tok + "'", path, line);
  return value;
}

long parse_long(const std::string& tok, const std::string& path, long line) {
  long value = 0;
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  const auto res = std::from_chars(b, e, value);
  if (res.ec != std::errc{} || res.ptr != e)
    throw ParseError("invalid integer '" + tok + "'", path, line);
  return value;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

PointCloud load_point_cloud(const std::string& path) {
  std::ifstream in = open_in(path);
  PointCloud cloud;
  bool any_label = false;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const std::vector<std::string> cols = split(line, ',');
    if (cols.size() != 3 && cols.size() != 4)
      throw ParseError("expected 3 or 4 comma-separated fields", path,
                       line_no);
    Vec3 p;
    for (int c = 0; c < 3; ++c) p[c] = parse_double(trim(cols[c]), path, line_no);
    PointLabel label = PointLabel::unlabeled;
    if (cols.size() == 4) {
      try {
        label = label_from_string(trim(cols[3]));
      } catch (const ArgumentError& err) {
        throw ParseError(err.what(), path, line_no);
      }
    }
    cloud.points.push_back(p);
    cloud.labels.push_back(label);
    if (label != PointLabel::unlabeled) any_label = true;
  }
  if (cloud.points.empty())
    throw ArgumentError("point cloud file has no points: " + path);
  if (!any_label) cloud.labels.clear();
  return cloud;
}

void save_point_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# x,y,z[,label]\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    out << format_double(p[0]) << ',' << format_double(p[1]) << ','
        << format_double(p[2]);
    const PointLabel l = cloud.label(i);
    if (l != PointLabel::unlabeled) out << ',' << label_to_string(l);
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace {

/// Reads the next content line (skipping blanks/comments); throws at EOF.
std::string next_line(std::ifstream& in, const std::string& path,
                      long* line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++*line_no;
    if (!is_blank_or_comment(line)) return line;
  }
  throw ParseError("unexpected end of file", path, *line_no);
}

}  // namespace

SplineSurface load_surface(const std::string& path) {
  std::ifstream in = open_in(path);
  long ln = 0;

  std::string line = next_line(in, path, &ln);
  if (trim(line) != "cuspfit-surface 1")
    throw ParseError("missing 'cuspfit-surface 1' header", path, ln);

  auto expect_keyword = [&](const std::string& line_, const char* kw,
                            std::size_t want) {
    const std::vector<std::string> toks = split_ws(line_);
    if (toks.empty() || toks[0] != kw)
      throw ParseError(std::string("expected '") + kw + "' line", path, ln);
    if (toks.size() != want + 1)
      throw ParseError(std::string("'") + kw + "' needs " +
                           std::to_string(want) + " fields",
                       path, ln);
    return std::vector<std::string>(toks.begin() + 1, toks.end());
  };

  SplineSurface s;
  {
    const auto f = expect_keyword(next_line(in, path, &ln), "periodic", 1);
    const long flag = parse_long(f[0], path, ln);
    if (flag != 0 && flag != 1)
      throw ParseError("periodic flag must be 0 or 1", path, ln);
    s.periodic_circ = flag == 1;
  }
  {
    const auto f = expect_keyword(next_line(in, path, &ln), "degrees", 2);
    s.degree_axial = static_cast<int>(parse_long(f[0], path, ln));
    s.degree_circ = static_cast<int>(parse_long(f[1], path, ln));
  }
  auto read_knots = [&](const char* kw, int degree, KnotKind kind) {
    const auto f = expect_keyword(next_line(in, path, &ln), kw, 1);
    const long count = parse_long(f[0], path, ln);
    if (count < 2) throw ParseError("knot count must be >= 2", path, ln);
    const std::vector<std::string> toks = split_ws(next_line(in, path, &ln));
    if (static_cast<long>(toks.size()) != count)
      throw ParseError("knot row has wrong length", path, ln);
    KnotVector kv;
    kv.degree = degree;
    kv.kind = kind;
    for (const auto& t : toks) kv.values.push_back(parse_double(t, path, ln));
    return kv;
  };
  s.knots_axial = read_knots("knots-axial", s.degree_axial, KnotKind::clamped);
  s.knots_circ = read_knots("knots-circ", s.degree_circ,
                            s.periodic_circ ? KnotKind::unclamped_uniform
                                            : KnotKind::clamped);
  {
    const auto f = expect_keyword(next_line(in, path, &ln), "grid", 2);
    const long rows = parse_long(f[0], path, ln);
    const long cols = parse_long(f[1], path, ln);
    if (rows < 1 || cols < 1)
      throw ParseError("grid dimensions must be positive", path, ln);
    s.free_grid = VecGrid(static_cast<int>(rows), static_cast<int>(cols));
  }
  for (auto& p : s.free_grid.data) {
    const std::vector<std::string> toks = split_ws(next_line(in, path, &ln));
    if (toks.size() != 3)
      throw ParseError("control point row needs 3 fields", path, ln);
    for (int c = 0; c < 3; ++c) p[c] = parse_double(toks[c], path, ln);
  }
  try {
    s.validate();
  } catch (const ArgumentError& err) {
    throw ParseError(std::string("inconsistent surface: ") + err.what(), path,
                     ln);
  }
  return s;
}

void save_surface(const SplineSurface& surface, const std::string& path) {
  surface.validate();
  std::ofstream out = open_out(path);
  out << "cuspfit-surface 1\n";
  out << "periodic " << (surface.periodic_circ ? 1 : 0) << '\n';
  out << "degrees " << surface.degree_axial << ' ' << surface.degree_circ
      << '\n';
  auto write_knots = [&](const char* kw, const KnotVector& kv) {
    out << kw << ' ' << kv.values.size() << '\n';
    for (std::size_t i = 0; i < kv.values.size(); ++i)
      out << (i ? " " : "") << format_double(kv.values[i]);
    out << '\n';
  };
  write_knots("knots-axial", surface.knots_axial);
  write_knots("knots-circ", surface.knots_circ);
  out << "grid " << surface.free_grid.rows << ' ' << surface.free_grid.cols
      << '\n';
  for (const Vec3& p : surface.free_grid.data)
    out << format_double(p[0]) << ' ' << format_double(p[1]) << ' '
        << format_double(p[2]) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

void save_quad_mesh(const SplineSurface& surface, const std::string& path,
                    int n_u, int n_v) {
  const SurfaceSamples samples = sample_surface(surface, n_u, n_v);
  std::ofstream out = open_out(path);
  out << "# quad mesh, " << n_u << " x " << n_v << " samples\n";
  for (const Vec3& p : samples.points)
    out << "v " << format_double(p[0]) << ' ' << format_double(p[1]) << ' '
        << format_double(p[2]) << '\n';
  const int cols = surface.periodic_circ ? n_v : n_v - 1;
  auto vid = [&](int a, int c) { return a * n_v + (c % n_v) + 1; };
  for (int a = 0; a + 1 < n_u; ++a)
    for (int c = 0; c < cols; ++c)
      out << "f " << vid(a, c) << ' ' << vid(a + 1, c) << ' '
          << vid(a + 1, c + 1) << ' ' << vid(a, c + 1) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

void save_loss_history_csv(const std::vector<HistoryEntry>& history,
                           const std::string& path) {
  std::ofstream out = open_out(path);
  out << "iteration,total,fidelity,regularization,d_cd,d_hd,d_a,r_orth,"
         "r_tpe,r_norm\n";
  for (const HistoryEntry& h : history) {
    const LossBreakdown& b = h.loss;
    out << h.iteration << ',' << format_double(b.total) << ','
        << format_double(b.fidelity) << ',' << format_double(b.regularization)
        << ',' << format_double(b.d_cd) << ',' << format_double(b.d_hd) << ','
        << format_double(b.d_a) << ',' << format_double(b.r_orth) << ','
        << format_double(b.r_tpe) << ',' << format_double(b.r_norm) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

void save_snnd_values_csv(const SnndReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "index,snnd\n";
  for (std::size_t i = 0; i < report.values.size(); ++i)
    out << i << ',' << format_double(report.values[i]) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

void save_snnd_histogram_csv(const SnndReport& report,
                             const std::string& path) {
  std::ofstream out = open_out(path);
  out << "bin_lo,bin_hi,percent\n";
  for (std::size_t b = 0; b + 1 < report.bin_edges.size(); ++b)
    out << format_double(report.bin_edges[b]) << ','
        << format_double(report.bin_edges[b + 1]) << ','
        << format_double(report.bin_percent[b]) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

void save_snnd_summary_csv(const std::vector<FrameSummary>& rows,
                           const std::string& path) {
  std::ofstream out = open_out(path);
  out << "frame,min,max,mean\n";
  for (const FrameSummary& r : rows)
    out << r.label << ',' << format_double(r.min_value) << ','
        << format_double(r.max_value) << ',' << format_double(r.mean_value)
        << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

void save_gradient_grid(const GradientGrid& grad, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# rows " << grad.rows << " cols " << grad.cols << '\n';
  for (int i = 0; i < grad.rows; ++i)
    for (int j = 0; j < grad.cols; ++j)
      out << i << ' ' << j << ' ' << format_double(grad(i, j)[0]) << ' '
          << format_double(grad(i, j)[1]) << ' '
          << format_double(grad(i, j)[2]) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

FrameSequence load_manifest(const std::string& path) {
  std::ifstream in = open_in(path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  FrameSequence frames;
  std::string line;
  long ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (is_blank_or_comment(line)) continue;
    const std::vector<std::string> toks = split_ws(line);
    if (toks.size() != 2)
      throw ParseError("manifest line needs '<label> <cloud-path>'", path,
                       ln);
    std::filesystem::path cloud_path(toks[1]);
    if (cloud_path.is_relative()) cloud_path = base / cloud_path;
    frames.push_back({toks[0], load_point_cloud(cloud_path.string())});
  }
  if (frames.empty())
    throw ParseError("manifest lists no frames", path, ln);
  return frames;
}

std::map<std::string, std::string> load_key_value(const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  long ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (is_blank_or_comment(line)) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", path, ln);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", path, ln);
    kv[key] = value;
  }
  return kv;
}

void apply_config(const std::map<std::string, std::string>& kv,
                  FitConfig* config) {
  auto as_double = [](const std::string& v) {
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
      throw ArgumentError("invalid numeric config value '" + v + "'");
    return x;
  };
  auto as_int = [&](const std::string& v) {
    return static_cast<int>(as_double(v));
  };
  auto as_bool = [](const std::string& v) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ArgumentError("invalid boolean config value '" + v + "'");
  };

  for (const auto& [key, value] : kv) {
    if (key == "wcd") config->weights.w_cd = as_double(value);
    else if (key == "whd") config->weights.w_hd = as_double(value);
    else if (key == "wa") config->weights.w_a = as_double(value);
    else if (key == "worth") config->weights.w_orth = as_double(value);
    else if (key == "wtpe") config->weights.w_tpe = as_double(value);
    else if (key == "wnorm") config->weights.w_norm = as_double(value);
    else if (key == "alpha") config->weights.tpe_alpha = as_double(value);
    else if (key == "delta") config->delta = as_double(value);
    else if (key == "tmax") config->t_max = as_int(value);
    else if (key == "nu") config->sample_nu = as_int(value);
    else if (key == "nv") config->sample_nv = as_int(value);
    else if (key == "record_every") config->record_every = as_int(value);
    else if (key == "threads") config->threads = as_int(value);
    else if (key == "plain_descent") config->plain_descent = as_bool(value);
    else if (key == "early_stop") config->early_stop = as_bool(value);
    else
      throw ArgumentError("unknown config key '" + key + "'");
  }
}

}  // namespace cuspfit
