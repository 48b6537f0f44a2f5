#pragma once

#include <string>
#include <vector>

#include "dsfl/rng.hpp"
#include "dsfl/types.hpp"

namespace dsfl {

struct Dataset {
    std::vector<Example> examples;
    std::vector<std::int64_t> class_counts;  // per label

    static Dataset from_examples(std::vector<Example> ex);
};

// Disjoint shards of example indices, one per MED, all nonempty.
struct Partition {
    std::vector<std::vector<int>> shards;
};

// Label 0: low-amplitude textured background (uniform [0, 0.3] pixels,
// one 3x3 mean-smoothing pass). Label 1: same background plus a Gaussian
// intensity bump (peak in [0.6, 1.0], width in [size/8, size/4], random
// pixel center), clipped to [0, 1]. Labels alternate, so counts are
// balanced within one. Classes are separable by peak intensity.
Dataset gen_synthetic(int n, int image_size, RngStream& rng);

// Per class, proportions over MEDs are drawn from a symmetric
// Dirichlet(alpha); a post-pass moves one example from the largest shard
// into each empty shard until all are nonempty.
Partition partition_dirichlet(const std::vector<int>& labels, int n_meds, double alpha,
                              RngStream& rng);

// Normalized label histogram of the given example indices.
std::vector<double> label_distribution(const std::vector<int>& labels,
                                       const std::vector<int>& subset, int n_classes = 2);

// Binary PGM ("P5", maxval 255). Loading maps pixels to [0,1] by /255,
// center-crops to the largest multiple of image_size, and mean-pools down
// to image_size x image_size. Parse errors name the offending byte offset.
Image load_pgm(const std::string& path, int image_size);
void save_pgm(const Image& img, const std::string& path);

// Loads `<dir>/labels.csv` (filename,label) and the PGM files it names;
// falls back to `..._<label>.pgm` filename suffixes if labels.csv is absent.
Dataset load_pgm_directory(const std::string& dir, int image_size);

}  // namespace dsfl
