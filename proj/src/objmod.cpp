#include "oolang/objmod.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace oolang {

// ---- family / spec identity helpers ------------------------------------

std::string family_key(const std::string &name,
                       const std::vector<ParamRec> &params,
                       bool receiver_only) {
    std::string key = name + "/" + std::to_string(params.size());
    if (receiver_only)
        return key;
    key += ":";
    for (const auto &p : params) {
        if (p.type.is_class())
            key += 'c';
        else
            key += p.type.scalar == ScalarType::Int    ? 'i'
                   : p.type.scalar == ScalarType::Bool ? 'b'
                                                       : 'f';
    }
    return key;
}

std::string spec_key(const FuncRecord &f) {
    std::string key = f.family;
    for (int pos : f.dispatch_positions) {
        const ParamRec &p = f.params[pos];
        key += "|";
        if (p.is_const)
            key += "const ";
        key += p.type.class_name;
    }
    return key;
}

std::string display_spec(const FuncRecord &f) {
    if (f.kind == FuncKind::Free && f.family.empty())
        return f.name;
    std::string out;
    size_t first = 0;
    if (!f.member_of.empty()) {
        out += f.member_of + "::";
        first = 1; // receiver dropped from the argument list
    }
    out += f.name + "(";
    for (size_t i = first; i < f.params.size(); i++) {
        if (i > first)
            out += ", ";
        const ParamRec &p = f.params[i];
        if (p.is_const && p.type.is_class())
            out += "const ";
        out += type_name(p.type);
    }
    return out + ")";
}

std::vector<DispatchType> dispatch_tuple(const FuncRecord &f) {
    std::vector<DispatchType> out;
    for (int pos : f.dispatch_positions)
        out.push_back(
            {f.params[pos].type.class_name, f.params[pos].is_const});
    return out;
}

// ---- payload primitives --------------------------------------------------

void PayloadWriter::u16(uint16_t v) {
    out.push_back((uint8_t)v);
    out.push_back((uint8_t)(v >> 8));
}
void PayloadWriter::u32(uint32_t v) {
    for (int i = 0; i < 4; i++)
        out.push_back((uint8_t)(v >> (8 * i)));
}
void PayloadWriter::u64(uint64_t v) {
    for (int i = 0; i < 8; i++)
        out.push_back((uint8_t)(v >> (8 * i)));
}
void PayloadWriter::str(const std::string &s) {
    u32((uint32_t)s.size());
    out.insert(out.end(), s.begin(), s.end());
}
void PayloadWriter::bytes(const std::vector<uint8_t> &b) {
    u32((uint32_t)b.size());
    out.insert(out.end(), b.begin(), b.end());
}

bool PayloadReader::need(size_t n) {
    if (fail || (size_t)(end - p) < n) {
        fail = true;
        return false;
    }
    return true;
}
uint8_t PayloadReader::u8() {
    if (!need(1))
        return 0;
    return *p++;
}
uint16_t PayloadReader::u16() {
    if (!need(2))
        return 0;
    uint16_t v = (uint16_t)(p[0] | (p[1] << 8));
    p += 2;
    return v;
}
uint32_t PayloadReader::u32() {
    if (!need(4))
        return 0;
    uint32_t v = 0;
    for (int i = 0; i < 4; i++)
        v |= (uint32_t)*p++ << (8 * i);
    return v;
}
uint64_t PayloadReader::u64() {
    if (!need(8))
        return 0;
    uint64_t v = 0;
    for (int i = 0; i < 8; i++)
        v |= (uint64_t)*p++ << (8 * i);
    return v;
}
std::string PayloadReader::str() {
    uint32_t n = u32();
    if (!need(n))
        return {};
    std::string s((const char *)p, n);
    p += n;
    return s;
}
std::vector<uint8_t> PayloadReader::bytes() {
    uint32_t n = u32();
    if (!need(n))
        return {};
    std::vector<uint8_t> b(p, p + n);
    p += n;
    return b;
}

// ---- envelope ------------------------------------------------------------

namespace {

uint64_t fnv1a64(const uint8_t *data, size_t len) {
    uint64_t hash = 1469598103934665603ull;
    for (size_t i = 0; i < len; i++) {
        hash ^= data[i];
        hash *= 1099511628211ull;
    }
    return hash;
}

constexpr size_t ENVELOPE_SIZE = 4 + 2 + 8 + 8;

} // namespace

const char *file_error_name(FileError e) {
    switch (e) {
    case FileError::None: return "ok";
    case FileError::BadMagic: return "bad magic";
    case FileError::VersionMismatch: return "format version mismatch";
    case FileError::Truncated: return "truncated file";
    case FileError::ChecksumMismatch: return "checksum mismatch";
    case FileError::Malformed: return "malformed payload";
    }
    return "unknown";
}

std::vector<uint8_t> seal_payload(const char magic[4],
                                  const std::vector<uint8_t> &payload) {
    PayloadWriter w;
    w.out.insert(w.out.end(), magic, magic + 4);
    w.u16(FORMAT_VERSION);
    w.u64(payload.size());
    w.u64(fnv1a64(payload.data(), payload.size()));
    w.out.insert(w.out.end(), payload.begin(), payload.end());
    return std::move(w.out);
}

FileError open_payload(const uint8_t *data, size_t len, const char magic[4],
                       std::vector<uint8_t> &payload_out) {
    if (len < 4)
        return FileError::Truncated;
    if (std::memcmp(data, magic, 4) != 0)
        return FileError::BadMagic;
    if (len < ENVELOPE_SIZE)
        return FileError::Truncated;
    PayloadReader r{data + 4, data + ENVELOPE_SIZE};
    uint16_t version = r.u16();
    uint64_t payload_len = r.u64();
    uint64_t checksum = r.u64();
    if (version != FORMAT_VERSION)
        return FileError::VersionMismatch;
    if (len != ENVELOPE_SIZE + payload_len)
        return FileError::Truncated;
    if (fnv1a64(data + ENVELOPE_SIZE, payload_len) != checksum)
        return FileError::ChecksumMismatch;
    payload_out.assign(data + ENVELOPE_SIZE, data + len);
    return FileError::None;
}

// ---- module payload ------------------------------------------------------

namespace {

void write_type(PayloadWriter &w, const TypeRef &t) {
    switch (t.kind) {
    case TypeRef::Kind::Void:
        w.u8(0);
        break;
    case TypeRef::Kind::Scalar:
        w.u8(1);
        w.u8((uint8_t)t.scalar);
        break;
    case TypeRef::Kind::Class:
        w.u8(2);
        w.str(t.class_name);
        break;
    }
}

bool read_type(PayloadReader &r, TypeRef &out) {
    uint8_t kind = r.u8();
    switch (kind) {
    case 0:
        out = TypeRef::void_type();
        return true;
    case 1: {
        uint8_t s = r.u8();
        if (s > (uint8_t)ScalarType::Float)
            return false;
        out = TypeRef::scalar_type((ScalarType)s);
        return true;
    }
    case 2:
        out = TypeRef::class_type(r.str());
        return true;
    default:
        return false;
    }
}

} // namespace

void write_classes(PayloadWriter &w, const std::vector<ClassInfo> &classes) {
    std::vector<const ClassInfo *> sorted;
    for (const auto &c : classes)
        sorted.push_back(&c);
    std::sort(sorted.begin(), sorted.end(),
              [](const ClassInfo *a, const ClassInfo *b) {
                  return a->name < b->name;
              });
    w.u32((uint32_t)sorted.size());
    for (const ClassInfo *c : sorted) {
        w.str(c->name);
        w.u32((uint32_t)c->parents.size());
        for (const auto &p : c->parents) {
            w.str(p.name);
            w.u8((uint8_t)((p.is_virtual ? 1 : 0) | (p.is_public ? 2 : 0)));
        }
        w.u32((uint32_t)c->fields.size());
        for (const auto &f : c->fields) {
            w.str(f.name);
            w.u8((uint8_t)f.type);
        }
    }
}

bool read_classes(PayloadReader &r, std::vector<ClassInfo> &out) {
    uint32_t count = r.u32();
    for (uint32_t i = 0; i < count && !r.fail; i++) {
        ClassInfo c;
        c.name = r.str();
        uint32_t nparents = r.u32();
        for (uint32_t j = 0; j < nparents && !r.fail; j++) {
            ClassInfo::Parent p;
            p.name = r.str();
            uint8_t flags = r.u8();
            if (flags > 3)
                return false;
            p.is_virtual = flags & 1;
            p.is_public = flags & 2;
            c.parents.push_back(std::move(p));
        }
        uint32_t nfields = r.u32();
        for (uint32_t j = 0; j < nfields && !r.fail; j++) {
            ClassInfo::Field f;
            f.name = r.str();
            uint8_t t = r.u8();
            if (t > (uint8_t)ScalarType::Float)
                return false;
            f.type = (ScalarType)t;
            c.fields.push_back(std::move(f));
        }
        out.push_back(std::move(c));
    }
    return !r.fail;
}

void write_func(PayloadWriter &w, const FuncRecord &f) {
    w.u8((uint8_t)f.kind);
    w.str(f.name);
    w.str(f.family);
    w.str(f.member_of);
    w.u32((uint32_t)f.params.size());
    for (const auto &p : f.params) {
        write_type(w, p.type);
        w.u8((uint8_t)((p.is_const ? 1 : 0) | (p.by_ref ? 2 : 0)));
        w.str(p.name);
    }
    write_type(w, f.return_type);
    w.u32((uint32_t)f.dispatch_positions.size());
    for (int pos : f.dispatch_positions)
        w.i32(pos);
    if (f.body) {
        w.u8(1);
        w.bytes(ir::serialize_body(*f.body));
    } else {
        w.u8(0);
    }
}

bool read_func(PayloadReader &r, FuncRecord &out) {
    uint8_t kind = r.u8();
    if (kind > (uint8_t)FuncKind::Virtual)
        return false;
    out.kind = (FuncKind)kind;
    out.name = r.str();
    out.family = r.str();
    out.member_of = r.str();
    uint32_t nparams = r.u32();
    for (uint32_t i = 0; i < nparams && !r.fail; i++) {
        ParamRec p;
        if (!read_type(r, p.type) || p.type.is_void())
            return false;
        uint8_t flags = r.u8();
        if (flags > 3)
            return false;
        p.is_const = flags & 1;
        p.by_ref = flags & 2;
        p.name = r.str();
        out.params.push_back(std::move(p));
    }
    if (!read_type(r, out.return_type))
        return false;
    uint32_t ndisp = r.u32();
    for (uint32_t i = 0; i < ndisp && !r.fail; i++) {
        int pos = r.i32();
        if (pos < 0 || (size_t)pos >= out.params.size())
            return false;
        out.dispatch_positions.push_back(pos);
    }
    if (r.u8()) {
        std::vector<uint8_t> body = r.bytes();
        if (r.fail)
            return false;
        auto parsed = ir::deserialize_body(body.data(), body.size());
        if (!parsed)
            return false;
        out.body = std::make_shared<ir::Body>(std::move(*parsed));
    }
    return !r.fail;
}

std::string func_sort_key(const FuncRecord &f) {
    if (f.kind == FuncKind::Free)
        return "0|" + (f.family.empty() ? f.name : f.family);
    return "1|" + spec_key(f);
}

std::vector<uint8_t> serialize_module(const Module &m,
                                      const std::vector<Diagnostic> &warnings) {
    PayloadWriter w;
    bool has_main = false;
    for (const auto &f : m.funcs)
        if (f.kind == FuncKind::Free && f.family.empty() &&
            f.name == "main" && f.body)
            has_main = true;
    w.u8(has_main ? 1 : 0);

    write_classes(w, m.classes);

    std::vector<const FuncRecord *> sorted;
    for (const auto &f : m.funcs)
        sorted.push_back(&f);
    std::sort(sorted.begin(), sorted.end(),
              [](const FuncRecord *a, const FuncRecord *b) {
                  return func_sort_key(*a) < func_sort_key(*b);
              });
    w.u32((uint32_t)sorted.size());
    for (const FuncRecord *f : sorted)
        write_func(w, *f);

    w.u32((uint32_t)warnings.size());
    for (const auto &d : warnings) {
        w.str(d.code);
        w.str(d.span.file);
        w.i32(d.span.line);
        w.i32(d.span.col);
        w.str(d.message);
    }
    return seal_payload(MODULE_MAGIC, w.out);
}

FileError deserialize_module(const uint8_t *data, size_t len, Module &out,
                             std::vector<Diagnostic> &warnings_out) {
    std::vector<uint8_t> payload;
    FileError err = open_payload(data, len, MODULE_MAGIC, payload);
    if (err != FileError::None)
        return err;
    PayloadReader r{payload.data(), payload.data() + payload.size()};
    r.u8(); // has_main flag; recomputed from contents on use
    if (!read_classes(r, out.classes))
        return FileError::Malformed;
    uint32_t nfuncs = r.u32();
    for (uint32_t i = 0; i < nfuncs && !r.fail; i++) {
        FuncRecord f;
        if (!read_func(r, f))
            return FileError::Malformed;
        out.funcs.push_back(std::move(f));
    }
    uint32_t nwarn = r.u32();
    for (uint32_t i = 0; i < nwarn && !r.fail; i++) {
        Diagnostic d;
        d.severity = Severity::Warning;
        d.code = r.str();
        d.span.file = r.str();
        d.span.line = r.i32();
        d.span.col = r.i32();
        d.message = r.str();
        warnings_out.push_back(std::move(d));
    }
    if (r.fail || !r.done())
        return FileError::Malformed;
    return FileError::None;
}

std::string dump_module(const Module &m,
                        const std::vector<Diagnostic> &warnings) {
    std::ostringstream os;
    bool has_main = false;
    for (const auto &f : m.funcs)
        if (f.kind == FuncKind::Free && f.family.empty() &&
            f.name == "main" && f.body)
            has_main = true;
    os << "module\n";
    os << "  main: " << (has_main ? "yes" : "no") << "\n";

    std::vector<const ClassInfo *> classes;
    for (const auto &c : m.classes)
        classes.push_back(&c);
    std::sort(classes.begin(), classes.end(),
              [](const ClassInfo *a, const ClassInfo *b) {
                  return a->name < b->name;
              });
    for (const ClassInfo *c : classes) {
        os << "  class " << c->name << "\n";
        for (const auto &p : c->parents)
            os << "    parent " << p.name << (p.is_virtual ? " virtual" : "")
               << (p.is_public ? " public" : " private") << "\n";
        for (const auto &f : c->fields)
            os << "    field " << f.name << " " << scalar_name(f.type)
               << "\n";
    }

    std::vector<const FuncRecord *> funcs;
    for (const auto &f : m.funcs)
        funcs.push_back(&f);
    std::sort(funcs.begin(), funcs.end(),
              [](const FuncRecord *a, const FuncRecord *b) {
                  return func_sort_key(*a) < func_sort_key(*b);
              });
    for (const FuncRecord *f : funcs) {
        const char *kind = f->kind == FuncKind::Free ? "function"
                           : f->kind == FuncKind::Multimethod
                               ? "multimethod"
                               : "virtual";
        os << "  " << kind << " " << display_spec(*f);
        if (!f->family.empty())
            os << " family=" << f->family;
        os << " return=" << type_name(f->return_type);
        os << (f->body ? "" : " declaration-only") << "\n";
        for (const auto &p : f->params) {
            os << "    param ";
            if (p.is_const)
                os << "const ";
            os << type_name(p.type);
            if (p.by_ref)
                os << " &";
            if (!p.name.empty())
                os << " " << p.name;
            os << "\n";
        }
        if (f->body) {
            os << "    body:\n";
            os << ir::dump_body(*f->body, 6);
        }
    }

    if (!warnings.empty()) {
        os << "  warnings:\n";
        for (const auto &d : warnings)
            os << "    " << format_diagnostic(d) << "\n";
    }
    return os.str();
}

} // namespace oolang
