#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oolang/diag.hpp"
#include "oolang/module.hpp"

// Object-file format. A file is an envelope (magic, format version, payload
// length, payload checksum) around a deterministic payload. `.oom` files
// carry one compiled module; the linked-image format reuses the same
// envelope with its own magic.

namespace oolang {

inline constexpr char MODULE_MAGIC[5] = "OOLM";
inline constexpr char IMAGE_MAGIC[5] = "OOLP";
inline constexpr uint16_t FORMAT_VERSION = 1;

enum class FileError {
    None,
    BadMagic,
    VersionMismatch,
    Truncated,
    ChecksumMismatch,
    Malformed,
};

const char *file_error_name(FileError e);

// Envelope handling, shared between .oom and .ool1.
std::vector<uint8_t> seal_payload(const char magic[4],
                                  const std::vector<uint8_t> &payload);
FileError open_payload(const uint8_t *data, size_t len, const char magic[4],
                       std::vector<uint8_t> &payload_out);

// Module serialization. Classes and functions are written in a canonical
// sorted order, so two serializations of equal modules are byte-identical
// regardless of declaration order. Phase-1 warnings are carried along for
// inspection; they are not replayed at link time.
std::vector<uint8_t> serialize_module(const Module &m,
                                      const std::vector<Diagnostic> &warnings);
FileError deserialize_module(const uint8_t *data, size_t len, Module &out,
                             std::vector<Diagnostic> &warnings_out);

std::string dump_module(const Module &m,
                        const std::vector<Diagnostic> &warnings);

// Byte-wise payload helpers reused by the linked-image serializer.
struct PayloadWriter {
    std::vector<uint8_t> out;
    void u8(uint8_t v) { out.push_back(v); }
    void u16(uint16_t v);
    void u32(uint32_t v);
    void i32(int32_t v) { u32((uint32_t)v); }
    void u64(uint64_t v);
    void str(const std::string &s);
    void bytes(const std::vector<uint8_t> &b);
};

struct PayloadReader {
    const uint8_t *p = nullptr;
    const uint8_t *end = nullptr;
    bool fail = false;
    bool need(size_t n);
    uint8_t u8();
    uint16_t u16();
    uint32_t u32();
    int32_t i32() { return (int32_t)u32(); }
    uint64_t u64();
    std::string str();
    std::vector<uint8_t> bytes();
    bool done() const { return p == end; }
};

// Serialization of one function record (without envelope), reused by the
// image format.
void write_func(PayloadWriter &w, const FuncRecord &f);
bool read_func(PayloadReader &r, FuncRecord &out);
void write_classes(PayloadWriter &w, const std::vector<ClassInfo> &classes);
bool read_classes(PayloadReader &r, std::vector<ClassInfo> &out);

// Canonical ordering key for function records in serialized form.
std::string func_sort_key(const FuncRecord &f);

} // namespace oolang
