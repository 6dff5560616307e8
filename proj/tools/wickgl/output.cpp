#include "output.hpp"

#include <fmt/chrono.h>
#include <fmt/core.h>
#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <memory>

#include "wickgl/error.hpp"

#ifndef WICKGL_VERSION
#define WICKGL_VERSION "unknown"
#endif

namespace wickgl::cli {

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

namespace {

void dump_into(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        dump_into(item, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        dump_into(v[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      break;
    }
    default:
      out += v.dump();
  }
}

std::string utc(std::chrono::system_clock::time_point t) {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(t)));
}

}  // namespace

std::string dump(const Json& value) {
  std::string out;
  dump_into(value, out);
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

RunContext::RunContext(std::string command, std::string parameters,
                       std::string out_dir)
    : command_(std::move(command)),
      parameters_(std::move(parameters)),
      out_dir_(std::move(out_dir)),
      start_(std::chrono::system_clock::now()) {
  if (writes_files()) std::filesystem::create_directories(out_dir_);
}

std::filesystem::path RunContext::output(const std::string& name) {
  const auto path = out_dir_ / name;
  outputs_.push_back(path);
  return path;
}

void RunContext::finish() {
  if (!writes_files()) return;
  {
    std::ofstream ini(out_dir_ / "run.ini");
    ini << parameters_;
  }
  Json m;
  m["schema"] = schema::kManifest;
  m["command"] = command_;
  m["version"] = WICKGL_VERSION;
  m["parameters"] = parameters_;
  m["seed"] = has_seed_ ? Json(seed_) : Json(nullptr);
  m["started"] = utc(start_);
  m["finished"] = utc(std::chrono::system_clock::now());
  Json digests = Json::object();
  for (const auto& p : outputs_) {
    digests[p.filename().string()] = sha256_file(p);
  }
  m["outputs"] = digests;
  std::ofstream out(out_dir_ / "manifest.json");
  out << dump(m) << '\n';
}

}  // namespace wickgl::cli
