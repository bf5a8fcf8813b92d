#include <fstream>
#include <map>
#include <sstream>

#include "tklu/ec.hpp"
#include "tklu/errors.hpp"

namespace tklu {

namespace {

BigInt parse_int(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  const auto last = s.find_last_not_of(" \t\r");
  if (first == std::string::npos) throw Error(ErrorCode::InvalidCurve, "empty value");
  s = s.substr(first, last - first + 1);
  BigInt v;
  int rc;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    rc = v.set_str(s.substr(2), 16);
  } else {
    rc = v.set_str(s, 10);
  }
  if (rc != 0) throw Error(ErrorCode::InvalidCurve, "bad integer '" + s + "'");
  return v;
}

CurveParams make(std::string name, const char* p, const char* a, const char* b, const char* gx, const char* gy,
                 const char* order) {
  CurveParams c;
  c.name = std::move(name);
  c.p = parse_int(p);
  c.a = parse_int(a);
  c.b = parse_int(b);
  c.base = CurvePoint::affine(parse_int(gx), parse_int(gy));
  c.order = parse_int(order);
  return c;
}

}  // namespace

std::vector<std::string> curve_preset_names() { return {"toy19", "test64", "secp256k1"}; }

CurveParams curve_preset(std::string_view name) {
  if (name == "toy19") return make("toy19", "17", "2", "2", "5", "1", "19");
  if (name == "test64") {
    // Prime-order curve found by random search with baby-step giant-step point counting.
    return make("test64", "0x800000000000304d", "0x4f4e02eb2f4a4a6f", "0x3f9c5bc89dcab95c", "0x64eef00c105af476",
                "0x34a45b7fa0cd9e7d", "0x80000000b073435b");
  }
  if (name == "secp256k1") {
    return make("secp256k1", "0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F", "0", "7",
                "0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798",
                "0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8",
                "0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141");
  }
  throw Error(ErrorCode::InvalidArgument, "unknown curve preset '" + std::string(name) + "'");
}

CurveParams parse_curve_config(std::string_view text, std::string name) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidCurve, "expected key = value: " + line);
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    kv[key] = line.substr(eq + 1);
  }
  for (const char* k : {"p", "a", "b", "gx", "gy", "order"}) {
    if (!kv.count(k)) throw Error(ErrorCode::InvalidCurve, std::string("missing field '") + k + "'");
  }
  CurveParams c;
  c.name = kv.count("name") ? kv["name"].substr(kv["name"].find_first_not_of(" \t")) : std::move(name);
  c.p = parse_int(kv["p"]);
  c.a = parse_int(kv["a"]);
  c.b = parse_int(kv["b"]);
  c.base = CurvePoint::affine(parse_int(kv["gx"]), parse_int(kv["gy"]));
  c.order = parse_int(kv["order"]);
  validate_curve(c);
  return c;
}

CurveParams load_curve_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open curve file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_curve_config(ss.str(), path);
}

}  // namespace tklu
