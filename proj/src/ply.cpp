#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

#include "physcon/data_io.hpp"
#include "physcon/error.hpp"

namespace physcon {

namespace {

struct TypeName {
  const char* name;
  PlyType type;
};

constexpr TypeName kTypeNames[] = {
    {"char", PlyType::Int8},     {"int8", PlyType::Int8},       {"uchar", PlyType::UInt8},
    {"uint8", PlyType::UInt8},   {"short", PlyType::Int16},     {"int16", PlyType::Int16},
    {"ushort", PlyType::UInt16}, {"uint16", PlyType::UInt16},   {"int", PlyType::Int32},
    {"int32", PlyType::Int32},   {"uint", PlyType::UInt32},     {"uint32", PlyType::UInt32},
    {"float", PlyType::Float32}, {"float32", PlyType::Float32}, {"double", PlyType::Float64},
    {"float64", PlyType::Float64},
};

PlyType parse_type(const std::string& s, int line) {
  for (const auto& t : kTypeNames)
    if (s == t.name) return t.type;
  throw Error(ErrorKind::ParseError, "PLY header line " + std::to_string(line) +
                                         ": unknown property type '" + s + "'");
}

const char* type_name(PlyType t) {
  switch (t) {
    case PlyType::Int8: return "char";
    case PlyType::UInt8: return "uchar";
    case PlyType::Int16: return "short";
    case PlyType::UInt16: return "ushort";
    case PlyType::Int32: return "int";
    case PlyType::UInt32: return "uint";
    case PlyType::Float32: return "float";
    case PlyType::Float64: return "double";
  }
  return "double";
}

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 8;
}

bool is_integer(PlyType t) { return t != PlyType::Float32 && t != PlyType::Float64; }

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* bytes = reinterpret_cast<unsigned char*>(&v);
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  return v;
}

template <typename T>
void store_le(std::string& out, T v) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* bytes = reinterpret_cast<unsigned char*>(&v);
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

double decode(PlyType t, const char* p) {
  switch (t) {
    case PlyType::Int8: return load_le<std::int8_t>(p);
    case PlyType::UInt8: return load_le<std::uint8_t>(p);
    case PlyType::Int16: return load_le<std::int16_t>(p);
    case PlyType::UInt16: return load_le<std::uint16_t>(p);
    case PlyType::Int32: return load_le<std::int32_t>(p);
    case PlyType::UInt32: return load_le<std::uint32_t>(p);
    case PlyType::Float32: return load_le<float>(p);
    case PlyType::Float64: return load_le<double>(p);
  }
  return 0.0;
}

void encode(std::string& out, PlyType t, double v) {
  switch (t) {
    case PlyType::Int8: store_le(out, static_cast<std::int8_t>(v)); break;
    case PlyType::UInt8: store_le(out, static_cast<std::uint8_t>(v)); break;
    case PlyType::Int16: store_le(out, static_cast<std::int16_t>(v)); break;
    case PlyType::UInt16: store_le(out, static_cast<std::uint16_t>(v)); break;
    case PlyType::Int32: store_le(out, static_cast<std::int32_t>(v)); break;
    case PlyType::UInt32: store_le(out, static_cast<std::uint32_t>(v)); break;
    case PlyType::Float32: store_le(out, static_cast<float>(v)); break;
    case PlyType::Float64: store_le(out, v); break;
  }
}

void append_ascii(std::string& out, PlyType t, double v) {
  char buf[64];
  std::to_chars_result r;
  if (is_integer(t)) {
    r = std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(v));
  } else if (t == PlyType::Float32) {
    r = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(v));
  } else {
    r = std::to_chars(buf, buf + sizeof(buf), v);
  }
  out.append(buf, r.ptr);
}

// Whitespace tokenizer over the ascii body that tracks line numbers.
class Tokens {
 public:
  Tokens(const std::string& data, std::size_t pos, int line) : data_(data), pos_(pos), line_(line) {}

  double next(const std::string& context) {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) {
      if (data_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= data_.size()) {
      throw Error(ErrorKind::ParseError, "PLY: unexpected end of data in " + context);
    }
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    double v = 0.0;
    const char* first = data_.data() + start;
    const char* last = data_.data() + pos_;
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      throw Error(ErrorKind::ParseError, "PLY line " + std::to_string(line_) + ": bad number '" +
                                             data_.substr(start, pos_ - start) + "' in " + context);
    }
    return v;
  }

 private:
  const std::string& data_;
  std::size_t pos_;
  int line_;
};

}  // namespace

bool PlyElement::has(const std::string& property) const {
  return scalars.count(property) > 0 || lists.count(property) > 0;
}

const PlyElement* PlyFile::find(const std::string& name) const {
  for (const auto& e : elements)
    if (e.name == name) return &e;
  return nullptr;
}

PlyFile parse_ply(const std::string& bytes) {
  PlyFile ply;
  std::size_t pos = 0;
  int line_no = 0;
  PlyFormat format = PlyFormat::Ascii;
  bool saw_magic = false;
  bool saw_format = false;
  bool saw_end = false;

  while (pos < bytes.size()) {
    std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string::npos) break;
    std::string line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    const std::string where = "PLY header line " + std::to_string(line_no);
    if (line_no == 1) {
      if (word != "ply") throw Error(ErrorKind::ParseError, where + ": missing 'ply' magic");
      saw_magic = true;
      continue;
    }
    if (word.empty() || word == "comment" || word == "obj_info") continue;
    if (word == "format") {
      std::string kind, version;
      ls >> kind >> version;
      if (kind == "ascii") {
        format = PlyFormat::Ascii;
      } else if (kind == "binary_little_endian") {
        format = PlyFormat::BinaryLittleEndian;
      } else {
        throw Error(ErrorKind::ParseError, where + ": unsupported format '" + kind + "'");
      }
      saw_format = true;
    } else if (word == "element") {
      PlyElement e;
      long long count = -1;
      ls >> e.name >> count;
      if (e.name.empty() || !ls || count < 0) {
        throw Error(ErrorKind::ParseError, where + ": malformed element declaration");
      }
      e.count = static_cast<std::size_t>(count);
      ply.elements.push_back(std::move(e));
    } else if (word == "property") {
      if (ply.elements.empty()) {
        throw Error(ErrorKind::ParseError, where + ": property before any element");
      }
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        std::string ct, vt;
        ls >> ct >> vt >> p.name;
        p.is_list = true;
        p.count_type = parse_type(ct, line_no);
        p.type = parse_type(vt, line_no);
      } else {
        p.type = parse_type(t, line_no);
        ls >> p.name;
      }
      if (p.name.empty()) throw Error(ErrorKind::ParseError, where + ": property without a name");
      ply.elements.back().properties.push_back(p);
    } else if (word == "end_header") {
      saw_end = true;
      break;
    } else {
      throw Error(ErrorKind::ParseError, where + ": unexpected keyword '" + word + "'");
    }
  }
  if (!saw_magic || !saw_format || !saw_end) {
    throw Error(ErrorKind::ParseError, "PLY: incomplete header");
  }

  for (auto& e : ply.elements) {
    for (const auto& p : e.properties) {
      if (p.is_list) {
        e.lists[p.name].reserve(e.count);
      } else {
        e.scalars[p.name].reserve(e.count);
      }
    }
  }

  if (format == PlyFormat::Ascii) {
    Tokens tokens(bytes, pos, line_no + 1);
    for (auto& e : ply.elements) {
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.properties) {
          const std::string context = "element '" + e.name + "' property '" + p.name + "'";
          if (p.is_list) {
            const double n = tokens.next(context);
            if (n < 0 || n != std::floor(n)) {
              throw Error(ErrorKind::ParseError, "PLY: invalid list length in " + context);
            }
            std::vector<double> values(static_cast<std::size_t>(n));
            for (auto& v : values) v = tokens.next(context);
            e.lists[p.name].push_back(std::move(values));
          } else {
            e.scalars[p.name].push_back(tokens.next(context));
          }
        }
      }
    }
    return ply;
  }

  for (auto& e : ply.elements) {
    for (std::size_t i = 0; i < e.count; ++i) {
      for (const auto& p : e.properties) {
        auto take = [&](PlyType t) {
          const std::size_t n = type_size(t);
          if (pos + n > bytes.size()) {
            throw Error(ErrorKind::ParseError, "PLY: truncated binary data in element '" + e.name +
                                                   "' row " + std::to_string(i));
          }
          const double v = decode(t, bytes.data() + pos);
          pos += n;
          return v;
        };
        if (p.is_list) {
          const double n = take(p.count_type);
          if (n < 0) throw Error(ErrorKind::ParseError, "PLY: negative list length");
          std::vector<double> values(static_cast<std::size_t>(n));
          for (auto& v : values) v = take(p.type);
          e.lists[p.name].push_back(std::move(values));
        } else {
          e.scalars[p.name].push_back(take(p.type));
        }
      }
    }
  }
  return ply;
}

PlyFile read_ply(const std::filesystem::path& path) { return parse_ply(read_file(path)); }

void write_ply(const std::filesystem::path& path, const PlyFile& ply, PlyFormat format) {
  std::string out = "ply\nformat ";
  out += format == PlyFormat::Ascii ? "ascii" : "binary_little_endian";
  out += " 1.0\n";
  for (const auto& e : ply.elements) {
    out += "element " + e.name + " " + std::to_string(e.count) + "\n";
    for (const auto& p : e.properties) {
      if (p.is_list) {
        out += std::string("property list ") + type_name(p.count_type) + " " + type_name(p.type) +
               " " + p.name + "\n";
      } else {
        out += std::string("property ") + type_name(p.type) + " " + p.name + "\n";
      }
    }
  }
  out += "end_header\n";

  for (const auto& e : ply.elements) {
    std::vector<const std::vector<double>*> scalar_cols;
    std::vector<const std::vector<std::vector<double>>*> list_cols;
    for (const auto& p : e.properties) {
      if (p.is_list) {
        const auto it = e.lists.find(p.name);
        if (it == e.lists.end() || it->second.size() != e.count) {
          throw Error(ErrorKind::PreconditionViolated, "PLY list '" + p.name + "' has wrong length");
        }
        list_cols.push_back(&it->second);
        scalar_cols.push_back(nullptr);
      } else {
        const auto it = e.scalars.find(p.name);
        if (it == e.scalars.end() || it->second.size() != e.count) {
          throw Error(ErrorKind::PreconditionViolated, "PLY column '" + p.name + "' has wrong length");
        }
        scalar_cols.push_back(&it->second);
        list_cols.push_back(nullptr);
      }
    }
    for (std::size_t i = 0; i < e.count; ++i) {
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const auto& p = e.properties[k];
        if (format == PlyFormat::Ascii && k > 0) out += ' ';
        if (p.is_list) {
          const auto& values = (*list_cols[k])[i];
          if (format == PlyFormat::Ascii) {
            append_ascii(out, p.count_type, static_cast<double>(values.size()));
            for (double v : values) {
              out += ' ';
              append_ascii(out, p.type, v);
            }
          } else {
            encode(out, p.count_type, static_cast<double>(values.size()));
            for (double v : values) encode(out, p.type, v);
          }
        } else if (format == PlyFormat::Ascii) {
          append_ascii(out, p.type, (*scalar_cols[k])[i]);
        } else {
          encode(out, p.type, (*scalar_cols[k])[i]);
        }
      }
      if (format == PlyFormat::Ascii) out += '\n';
    }
  }
  write_file_atomic(path, out);
}

}  // namespace physcon
