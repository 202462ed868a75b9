#include "hoc/persist.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "hoc/curves.hpp"
#include "hoc/errors.hpp"

namespace hoc {

namespace {

std::uint64_t fnv1a64(std::span<const std::uint8_t> data) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto b : data) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

struct Writer {
    std::vector<std::uint8_t> bytes;

    void u8(std::uint8_t v) { bytes.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i)
            bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

struct Reader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    void need(std::size_t n) {
        if (pos + n > bytes.size())
            throw persist_error(persist_errc::corrupt,
                                "payload ends inside a node record");
    }
    std::uint8_t u8() {
        need(1);
        return bytes[pos++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * i);
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    bool done() const { return pos == bytes.size(); }
};

void write_node(Writer& w, const Node& n, bool with_tags) {
    w.u8(n.leaf ? 1 : 0);
    w.u8(static_cast<std::uint8_t>(n.cell.depth));
    w.u32(n.cell.cx);
    w.u32(n.cell.cy);
    w.u32(n.cell.ct);

    if (n.leaf) {
        w.u64(n.label);
        w.u64(n.entries.size());
        for (const auto& e : n.entries) {
            w.u64(e.id);
            w.f64(e.x);
            w.f64(e.y);
            w.f64(e.t);
        }
        if (!n.entries.empty() && with_tags) {
            const MbrSign& tag = *n.mbr;
            w.f32(tag.x_min);
            w.f32(tag.y_min);
            w.f32(tag.x_max);
            w.f32(tag.y_max);
        }
    } else {
        std::uint8_t mask = 0;
        for (int i = 0; i < 8; ++i)
            if (n.children[i])
                mask |= static_cast<std::uint8_t>(1u << i);
        w.u8(mask);
        for (int i = 0; i < 8; ++i)
            if (n.children[i])
                write_node(w, *n.children[i], with_tags);
    }
}

[[noreturn]] void corrupt(const std::string& what) {
    throw persist_error(persist_errc::corrupt, what);
}

std::unique_ptr<Node> read_node(Reader& r, const IndexConfig& cfg,
                                const CellCoord& expected, bool with_tags) {
    const std::uint8_t kind = r.u8();
    if (kind > 1)
        corrupt("unknown node kind " + std::to_string(kind));
    const int depth = r.u8();
    const std::uint32_t cx = r.u32();
    const std::uint32_t cy = r.u32();
    const std::uint32_t ct = r.u32();
    if (depth != expected.depth || cx != expected.cx || cy != expected.cy ||
        ct != expected.ct)
        corrupt("node cell does not match its position in the tree");

    auto n = std::make_unique<Node>();
    n->cell = expected;
    n->label = morton3_encode(expected).value;
    n->hilbert_cell = expected.depth > 0
                          ? hilbert_encode(expected.cx, expected.cy, expected.depth)
                          : 0;

    if (kind == 1) {
        if (r.u64() != n->label)
            corrupt("leaf label disagrees with its Morton key");
        const std::uint64_t count = r.u64();
        if (count > cfg.split_threshold && depth < cfg.max_depth)
            corrupt("leaf above the deepest level exceeds the split threshold");
        n->entries.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            STObject e{r.u64(), r.f64(), r.f64(), r.f64()};
            if (!std::isfinite(e.x) || !std::isfinite(e.y) || !std::isfinite(e.t) ||
                !cfg.in_domain(e))
                corrupt("entry " + std::to_string(e.id) + " outside the domain");
            if (quantize(e, cfg, depth) != expected)
                corrupt("entry " + std::to_string(e.id) + " outside its leaf cube");
            n->entries.push_back(e);
        }
        if (count > 0) {
            if (with_tags) {
                MbrSign tag{r.f32(), r.f32(), r.f32(), r.f32()};
                if (!(tag.x_min <= tag.x_max) || !(tag.y_min <= tag.y_max))
                    corrupt("inverted MBR tag");
                for (const auto& e : n->entries)
                    if (!tag.contains(e.x, e.y))
                        corrupt("MBR tag does not cover its leaf entries");
                n->mbr = tag;
            } else {
                n->mbr = compute_mbrsign(n->entries);
            }
        }
    } else {
        if (depth >= cfg.max_depth)
            corrupt("internal node at the deepest level");
        const std::uint8_t mask = r.u8();
        if (mask == 0)
            corrupt("internal node with no children");
        for (int i = 0; i < 8; ++i) {
            if (!(mask & (1u << i)))
                continue;
            const CellCoord child{(cx << 1) | (static_cast<std::uint32_t>(i) & 1u),
                                  (cy << 1) | ((static_cast<std::uint32_t>(i) >> 1) & 1u),
                                  (ct << 1) | ((static_cast<std::uint32_t>(i) >> 2) & 1u),
                                  depth + 1};
            n->children[i] = read_node(r, cfg, child, with_tags);
        }
        n->leaf = false;
    }
    return n;
}

} // namespace

std::vector<std::uint8_t> serialize(const HocTree& tree, bool with_mbr_tags) {
    Writer payload;
    write_node(payload, tree.root(), with_mbr_tags);

    const IndexConfig& cfg = tree.config();
    Writer w;
    w.bytes.reserve(kIndexHeaderSize + payload.bytes.size());
    for (const auto b : kIndexMagic)
        w.u8(b);
    w.u32(kIndexFormatVersion);
    w.u32(with_mbr_tags ? kIndexFlagMbrTags : 0);
    w.f64(cfg.x_lo);
    w.f64(cfg.x_hi);
    w.f64(cfg.y_lo);
    w.f64(cfg.y_hi);
    w.f64(cfg.t_lo);
    w.f64(cfg.t_hi);
    w.u32(static_cast<std::uint32_t>(cfg.max_depth));
    w.u32(cfg.split_threshold);
    w.u64(tree.object_count());
    w.u64(payload.bytes.size());
    w.u64(fnv1a64(payload.bytes));

    w.bytes.insert(w.bytes.end(), payload.bytes.begin(), payload.bytes.end());
    return std::move(w.bytes);
}

HocTree deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kIndexMagic.size())
        throw persist_error(persist_errc::truncated, "file shorter than the magic tag");
    if (!std::equal(kIndexMagic.begin(), kIndexMagic.end(), bytes.begin()))
        throw persist_error(persist_errc::bad_magic, "not a HOC-Tree index file");
    if (bytes.size() < kIndexHeaderSize)
        throw persist_error(persist_errc::truncated, "file shorter than the header");

    Reader h{bytes.subspan(kIndexMagic.size(), kIndexHeaderSize - kIndexMagic.size())};
    const std::uint32_t version = h.u32();
    if (version != kIndexFormatVersion)
        throw persist_error(persist_errc::bad_version,
                            "format version " + std::to_string(version) + ", expected " +
                                std::to_string(kIndexFormatVersion));
    const std::uint32_t flags = h.u32();
    IndexConfig cfg;
    cfg.x_lo = h.f64();
    cfg.x_hi = h.f64();
    cfg.y_lo = h.f64();
    cfg.y_hi = h.f64();
    cfg.t_lo = h.f64();
    cfg.t_hi = h.f64();
    cfg.max_depth = static_cast<int>(h.u32());
    cfg.split_threshold = h.u32();
    const std::uint64_t object_count = h.u64();
    const std::uint64_t payload_size = h.u64();
    const std::uint64_t checksum = h.u64();

    try {
        cfg.validate();
    } catch (const domain_error& e) {
        corrupt(std::string("invalid config in header: ") + e.what());
    }

    const auto payload = bytes.subspan(kIndexHeaderSize);
    if (payload.size() < payload_size)
        throw persist_error(persist_errc::truncated,
                            "payload has " + std::to_string(payload.size()) +
                                " bytes, header promises " +
                                std::to_string(payload_size));
    if (payload.size() > payload_size)
        corrupt("trailing bytes after the payload");
    if (fnv1a64(payload) != checksum)
        throw persist_error(persist_errc::bad_checksum, "payload checksum mismatch");

    Reader r{payload};
    auto root = read_node(r, cfg, CellCoord{0, 0, 0, 0}, flags & kIndexFlagMbrTags);
    if (!r.done())
        corrupt("unread bytes after the root subtree");

    try {
        return HocTree::adopt(cfg, std::move(root), object_count);
    } catch (const domain_error& e) {
        corrupt(e.what());
    }
}

std::size_t save(const HocTree& tree, const std::filesystem::path& path,
                 bool with_mbr_tags) {
    const auto bytes = serialize(tree, with_mbr_tags);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw persist_error(persist_errc::io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw persist_error(persist_errc::io, "write failed for " + path.string());
    return bytes.size();
}

HocTree load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw persist_error(persist_errc::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad())
        throw persist_error(persist_errc::io, "read failed for " + path.string());
    return deserialize(bytes);
}

} // namespace hoc
