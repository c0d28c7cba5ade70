#pragma once

// Trie snapshot file, version 1. All integers are unsigned little-endian,
// all reals are IEEE-754 binary64 bit patterns stored little-endian, so a
// snapshot round-trips bit-exactly on any host.
//
//   magic        8 bytes  "TANNTRIE"
//   version      u32      1
//   byte order   u32      0x01020304 (reads back as 04 03 02 01 on disk)
//   depth        u64      declared depth
//   root         u64      arena index, or 2^64-1 for an empty trie
//   node count   u64
//   nodes        node count records:
//     left u64, right u64 (2^64-1 = absent), feature_index u64, network
//   network      loss u8 (0 BCE, 1 MSE, 2 CrossEntropy), layer count u64,
//                then per layer a u8 tag followed by its fields:
//     0 Dense         rows u64, cols u64, weight f64[rows*cols], bias f64[rows]
//     1 Activation    kind u8 (0 ReLU, 1 Sigmoid, 2 Identity)
//     2 Dropout       p f64
//     3 Recurrent     hidden u64, step u64, seq_len u64, input_width u64,
//                     w_ih f64[hidden*step], w_hh f64[hidden*hidden], bias f64[hidden]
//     4 Conv1D        channels u64, width u64, kernels f64[channels*width], bias f64[channels]
//     5 ComplexDense  rows u64, cols u64, real_input u8,
//                     weight (re f64, im f64)[rows*cols], bias (re f64, im f64)[rows]
//     6 Magnitude     (no fields)

#include <filesystem>
#include <iosfwd>

#include "tann/nn.hpp"
#include "tann/trie.hpp"

namespace tann {

void write_network(std::ostream& out, const nn::Network& net);
nn::Network read_network(std::istream& in);

void write_snapshot(std::ostream& out, const Trie& t);
Trie read_snapshot(std::istream& in);

void save_snapshot(const std::filesystem::path& path, const Trie& t);
Trie load_snapshot(const std::filesystem::path& path);

}  // namespace tann
