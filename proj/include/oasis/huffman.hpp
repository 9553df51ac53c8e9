#pragma once

// Canonical Huffman codec for quantized activation streams.
//
// Construction merges the two lowest-frequency nodes, breaking ties by the
// lowest symbol contained in each node, so code lengths are reproducible
// across platforms. Codes are then reassigned canonically: shorter codes
// numerically precede longer ones, ties broken by ascending symbol value.
// A single-symbol alphabet gets a 1-bit code.
//
// Stream file format (little-endian):
//   magic "OASH", version u8=1, symbol bit-width u8, alphabet size u16,
//   per entry (symbol i8, code length u8) in canonical order,
//   symbol_count u64, payload length u64, payload (MSB-first bit packing,
//   zero padding up to the byte boundary).

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "oasis/entropy.hpp"
#include "oasis/errors.hpp"

namespace oasis::huffman {

struct Code {
    std::uint64_t bits = 0;  // right-aligned code value
    std::uint8_t length = 0;
    bool operator==(const Code&) const = default;
};

struct Codebook {
    std::map<Symbol, std::uint8_t> code_lengths;
    std::map<Symbol, Code> codes;

    [[nodiscard]] std::size_t alphabet_size() const { return code_lengths.size(); }
    bool operator==(const Codebook&) const = default;
};

struct EncodedStream {
    Codebook codebook;
    std::uint64_t symbol_count = 0;
    std::vector<std::uint8_t> payload;
    std::uint8_t symbol_bits = 8;  // bit-width of the raw symbols, header metadata
    bool operator==(const EncodedStream&) const = default;
};

namespace detail {

// Canonical assignment from lengths: iterate (length, symbol) ascending.
inline void assign_canonical_codes(Codebook& cb) {
    std::vector<std::pair<std::uint8_t, Symbol>> order;
    order.reserve(cb.code_lengths.size());
    for (auto [sym, len] : cb.code_lengths) {
        order.emplace_back(len, sym);
    }
    std::sort(order.begin(), order.end());

    cb.codes.clear();
    std::uint64_t code = 0;
    std::uint8_t prev_len = 0;
    for (auto [len, sym] : order) {
        if (len == 0 || len > 63) {
            throw CorruptStream("code length " + std::to_string(int{len}) + " out of range");
        }
        code <<= (len - prev_len);
        if (prev_len != 0 && code >> len) {
            throw CorruptStream("code lengths violate the Kraft inequality");
        }
        cb.codes[sym] = Code{code, len};
        ++code;
        prev_len = len;
    }
    // A complete code ends exactly at 2^len; a one-symbol book ends at 1.
    if (order.size() > 1 && code != (std::uint64_t{1} << prev_len)) {
        throw CorruptStream("code lengths do not form a full prefix code");
    }
}

struct BitWriter {
    std::vector<std::uint8_t> bytes;
    std::uint32_t bit_pos = 0;  // bits used in the last byte

    void put(std::uint64_t value, std::uint8_t length) {
        for (int i = length - 1; i >= 0; --i) {
            if (bit_pos == 0) {
                bytes.push_back(0);
            }
            const std::uint8_t bit = static_cast<std::uint8_t>((value >> i) & 1u);
            bytes.back() |= static_cast<std::uint8_t>(bit << (7 - bit_pos));
            bit_pos = (bit_pos + 1) % 8;
        }
    }
};

struct BitReader {
    std::span<const std::uint8_t> bytes;
    std::uint64_t pos = 0;  // absolute bit index

    [[nodiscard]] bool exhausted() const { return pos >= bytes.size() * 8ull; }

    std::uint8_t next() {
        if (exhausted()) {
            throw CorruptStream("payload exhausted mid-symbol");
        }
        const std::uint8_t byte = bytes[pos / 8];
        const std::uint8_t bit = static_cast<std::uint8_t>((byte >> (7 - pos % 8)) & 1u);
        ++pos;
        return bit;
    }
};

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

struct ByteCursor {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;

    std::uint8_t u8() {
        if (pos + 1 > data.size()) throw TruncatedPayload("stream header truncated");
        return data[pos++];
    }
    std::uint16_t u16() {
        if (pos + 2 > data.size()) throw TruncatedPayload("stream header truncated");
        std::uint16_t v = static_cast<std::uint16_t>(data[pos] | (data[pos + 1] << 8));
        pos += 2;
        return v;
    }
    std::uint64_t u64() {
        if (pos + 8 > data.size()) throw TruncatedPayload("stream header truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= std::uint64_t{data[pos + i]} << (8 * i);
        }
        pos += 8;
        return v;
    }
};

}  // namespace detail

inline Codebook build_codebook(const SymbolHistogram& hist) {
    if (hist.counts.empty() || hist.total == 0) {
        throw EmptyHistogram("cannot build a codebook from an empty histogram");
    }

    struct Node {
        std::uint64_t weight;
        Symbol min_symbol;
        int left = -1;
        int right = -1;
        Symbol symbol = 0;
        bool leaf = false;
    };
    std::vector<Node> nodes;
    nodes.reserve(hist.counts.size() * 2);
    for (auto [sym, count] : hist.counts) {
        if (count == 0) continue;
        nodes.push_back(Node{count, sym, -1, -1, sym, true});
    }

    Codebook cb;
    if (nodes.size() == 1) {
        cb.code_lengths[nodes[0].symbol] = 1;  // degenerate alphabet, 1 bit/symbol
        detail::assign_canonical_codes(cb);
        return cb;
    }

    auto higher = [&nodes](int a, int b) {
        if (nodes[a].weight != nodes[b].weight) return nodes[a].weight > nodes[b].weight;
        return nodes[a].min_symbol > nodes[b].min_symbol;
    };
    std::priority_queue<int, std::vector<int>, decltype(higher)> queue(higher);
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        queue.push(i);
    }
    while (queue.size() > 1) {
        int a = queue.top();
        queue.pop();
        int b = queue.top();
        queue.pop();
        Node parent{nodes[a].weight + nodes[b].weight,
                    std::min(nodes[a].min_symbol, nodes[b].min_symbol), a, b, 0, false};
        nodes.push_back(parent);
        queue.push(static_cast<int>(nodes.size()) - 1);
    }

    // Depth-first walk to collect leaf depths.
    std::vector<std::pair<int, std::uint8_t>> stack{{queue.top(), 0}};
    while (!stack.empty()) {
        auto [idx, depth] = stack.back();
        stack.pop_back();
        const Node& n = nodes[idx];
        if (n.leaf) {
            cb.code_lengths[n.symbol] = depth;
        } else {
            stack.emplace_back(n.left, static_cast<std::uint8_t>(depth + 1));
            stack.emplace_back(n.right, static_cast<std::uint8_t>(depth + 1));
        }
    }
    detail::assign_canonical_codes(cb);
    return cb;
}

inline EncodedStream encode(std::span<const Symbol> symbols, const Codebook& cb) {
    detail::BitWriter writer;
    for (Symbol s : symbols) {
        auto it = cb.codes.find(s);
        if (it == cb.codes.end()) {
            throw UnknownSymbol("symbol " + std::to_string(int{s}) + " not in codebook");
        }
        writer.put(it->second.bits, it->second.length);
    }
    EncodedStream stream;
    stream.codebook = cb;
    stream.symbol_count = symbols.size();
    stream.payload = std::move(writer.bytes);
    return stream;
}

inline std::vector<Symbol> decode(const EncodedStream& stream) {
    // First-code/offset tables per length: O(max_len) per symbol, and every
    // read is bounds-checked so corrupt payloads cannot run past the buffer.
    std::vector<std::pair<std::uint8_t, Symbol>> order;
    order.reserve(stream.codebook.code_lengths.size());
    for (auto [sym, len] : stream.codebook.code_lengths) {
        order.emplace_back(len, sym);
    }
    if (order.empty() && stream.symbol_count > 0) {
        throw CorruptStream("nonzero symbol count with empty codebook");
    }
    std::sort(order.begin(), order.end());
    const std::uint8_t max_len = order.empty() ? 0 : order.back().first;
    std::vector<std::uint64_t> first_code(max_len + 2, 0);
    std::vector<std::uint64_t> first_index(max_len + 2, 0);
    std::vector<std::uint64_t> count(max_len + 2, 0);
    for (auto [len, sym] : order) {
        ++count[len];
    }
    {
        std::uint64_t code = 0, index = 0;
        for (std::uint8_t len = 1; len <= max_len; ++len) {
            first_code[len] = code;
            first_index[len] = index;
            code = (code + count[len]) << 1;
            index += count[len];
        }
    }

    // Every symbol costs at least one bit, so an over-long count is corrupt.
    if (stream.symbol_count > stream.payload.size() * 8ull) {
        throw CorruptStream("payload too short for declared symbol count");
    }
    std::vector<Symbol> out;
    out.reserve(stream.symbol_count);
    detail::BitReader reader{stream.payload};
    for (std::uint64_t i = 0; i < stream.symbol_count; ++i) {
        std::uint64_t acc = 0;
        std::uint8_t len = 0;
        for (;;) {
            acc = (acc << 1) | reader.next();
            ++len;
            if (len > max_len) {
                throw CorruptStream("invalid code in payload");
            }
            if (count[len] != 0 && acc - first_code[len] < count[len]) {
                out.push_back(order[first_index[len] + (acc - first_code[len])].second);
                break;
            }
        }
    }
    return out;
}

// Expected code length under the histogram's empirical distribution.
inline double avg_code_length(const Codebook& cb, const SymbolHistogram& hist) {
    if (hist.total == 0) {
        throw EmptyHistogram("average code length of an empty histogram");
    }
    double acc = 0.0;
    for (auto [sym, n] : hist.counts) {
        if (n == 0) continue;
        auto it = cb.code_lengths.find(sym);
        if (it == cb.code_lengths.end()) {
            throw SupportMismatch("histogram symbol " + std::to_string(int{sym}) +
                                  " missing from codebook");
        }
        acc += static_cast<double>(n) * it->second;
    }
    return acc / static_cast<double>(hist.total);
}

// Kraft sum == 1 exactly, evaluated in integer arithmetic.
inline bool is_kraft_complete(const Codebook& cb) {
    if (cb.code_lengths.empty()) return false;
    std::uint8_t max_len = 0;
    for (auto [sym, len] : cb.code_lengths) {
        max_len = std::max(max_len, len);
    }
    unsigned __int128 sum = 0;
    const unsigned __int128 one = static_cast<unsigned __int128>(1) << max_len;
    for (auto [sym, len] : cb.code_lengths) {
        sum += static_cast<unsigned __int128>(1) << (max_len - len);
    }
    return sum == one;
}

inline std::vector<std::uint8_t> write_stream(const EncodedStream& stream) {
    if (stream.codebook.code_lengths.empty()) {
        throw EmptyHistogram("cannot serialize a stream without a codebook");
    }
    if (stream.codebook.code_lengths.size() > 0xFFFF) {
        throw ValidationError("alphabet too large for stream header");
    }
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'O', 'A', 'S', 'H'});
    out.push_back(1);  // version
    out.push_back(stream.symbol_bits);
    detail::put_u16(out, static_cast<std::uint16_t>(stream.codebook.code_lengths.size()));

    std::vector<std::pair<std::uint8_t, Symbol>> order;
    for (auto [sym, len] : stream.codebook.code_lengths) {
        order.emplace_back(len, sym);
    }
    std::sort(order.begin(), order.end());
    for (auto [len, sym] : order) {
        out.push_back(static_cast<std::uint8_t>(sym));
        out.push_back(len);
    }
    detail::put_u64(out, stream.symbol_count);
    detail::put_u64(out, stream.payload.size());
    out.insert(out.end(), stream.payload.begin(), stream.payload.end());
    return out;
}

inline EncodedStream read_stream(std::span<const std::uint8_t> data) {
    detail::ByteCursor cur{data};
    if (data.size() < 4 || data[0] != 'O' || data[1] != 'A' || data[2] != 'S' ||
        data[3] != 'H') {
        throw BadMagic("not an OASH stream");
    }
    cur.pos = 4;
    const std::uint8_t version = cur.u8();
    if (version != 1) {
        throw CorruptStream("unsupported stream version " + std::to_string(int{version}));
    }
    EncodedStream stream;
    stream.symbol_bits = cur.u8();
    const std::uint16_t alphabet = cur.u16();
    if (alphabet == 0) {
        throw CorruptStream("stream declares an empty alphabet");
    }
    for (std::uint16_t i = 0; i < alphabet; ++i) {
        const Symbol sym = static_cast<Symbol>(cur.u8());
        const std::uint8_t len = cur.u8();
        if (len == 0) {
            throw CorruptStream("zero code length in stream header");
        }
        if (!stream.codebook.code_lengths.emplace(sym, len).second) {
            throw CorruptStream("duplicate symbol in stream header");
        }
    }
    detail::assign_canonical_codes(stream.codebook);
    stream.symbol_count = cur.u64();
    const std::uint64_t payload_len = cur.u64();
    if (payload_len > data.size() || cur.pos + payload_len > data.size()) {
        throw TruncatedPayload("declared payload exceeds file size");
    }
    stream.payload.assign(data.begin() + static_cast<std::ptrdiff_t>(cur.pos),
                          data.begin() + static_cast<std::ptrdiff_t>(cur.pos + payload_len));
    return stream;
}

}  // namespace oasis::huffman
