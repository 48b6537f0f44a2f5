#include "dsfl/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dsfl {

Dataset Dataset::from_examples(std::vector<Example> ex) {
    Dataset d;
    d.examples = std::move(ex);
    int max_label = 1;
    for (const auto& e : d.examples) max_label = std::max(max_label, e.label);
    d.class_counts.assign(max_label + 1, 0);
    for (const auto& e : d.examples) d.class_counts[e.label]++;
    return d;
}

namespace {

Image smooth_3x3(const Image& img) {
    Image out;
    out.side = img.side;
    out.px.resize(img.px.size());
    for (int r = 0; r < img.side; ++r) {
        for (int c = 0; c < img.side; ++c) {
            double sum = 0.0;
            int cnt = 0;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    int rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= img.side || cc < 0 || cc >= img.side) continue;
                    sum += img.at(rr, cc);
                    ++cnt;
                }
            out.at(r, c) = sum / cnt;
        }
    }
    return out;
}

}  // namespace

Dataset gen_synthetic(int n, int image_size, RngStream& rng) {
    if (n < 4) throw std::invalid_argument("gen_synthetic: n must be >= 4");
    if (image_size < 8) throw std::invalid_argument("gen_synthetic: image_size must be >= 8");

    std::vector<Example> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Image bg;
        bg.side = image_size;
        bg.px.resize(static_cast<std::size_t>(image_size) * image_size);
        for (auto& p : bg.px) p = rng.uniform(0.0, 0.3);
        Image img = smooth_3x3(bg);

        int label = i % 2;
        if (label == 1) {
            double peak = rng.uniform(0.6, 1.0);
            double width = rng.uniform(image_size / 8.0, image_size / 4.0);
            int cx = static_cast<int>(rng.next_below(image_size));
            int cy = static_cast<int>(rng.next_below(image_size));
            for (int r = 0; r < image_size; ++r)
                for (int c = 0; c < image_size; ++c) {
                    double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
                    img.at(r, c) += peak * std::exp(-d2 / (2.0 * width * width));
                }
            for (auto& p : img.px) p = std::clamp(p, 0.0, 1.0);
        }
        out.push_back(Example{std::move(img), label});
    }
    return Dataset::from_examples(std::move(out));
}

Partition partition_dirichlet(const std::vector<int>& labels, int n_meds, double alpha,
                              RngStream& rng) {
    if (n_meds <= 0) throw std::invalid_argument("partition_dirichlet: n_meds must be positive");
    if (static_cast<std::size_t>(n_meds) > labels.size())
        throw std::invalid_argument("partition_dirichlet: more MEDs than examples");
    if (alpha <= 0.0) throw std::invalid_argument("partition_dirichlet: alpha must be positive");

    int n_classes = 1;
    for (int l : labels) n_classes = std::max(n_classes, l + 1);

    Partition part;
    part.shards.assign(n_meds, {});
    for (int cls = 0; cls < n_classes; ++cls) {
        std::vector<int> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) idx.push_back(static_cast<int>(i));
        if (idx.empty()) continue;
        rng.shuffle(idx);
        std::vector<double> prop = rng.dirichlet(n_meds, alpha);

        // Contiguous cuts at the cumulative proportions.
        double cum = 0.0;
        std::size_t start = 0;
        for (int m = 0; m < n_meds; ++m) {
            cum += prop[m];
            std::size_t end = (m == n_meds - 1)
                                  ? idx.size()
                                  : std::min(idx.size(),
                                             static_cast<std::size_t>(std::floor(cum * idx.size() + 0.5)));
            if (end < start) end = start;
            for (std::size_t i = start; i < end; ++i) part.shards[m].push_back(idx[i]);
            start = end;
        }
    }

    // Every MED must hold at least one example.
    for (int m = 0; m < n_meds; ++m) {
        if (!part.shards[m].empty()) continue;
        int largest = 0;
        for (int j = 1; j < n_meds; ++j)
            if (part.shards[j].size() > part.shards[largest].size()) largest = j;
        if (part.shards[largest].size() <= 1)
            throw std::runtime_error("partition_dirichlet: cannot make all shards nonempty");
        part.shards[m].push_back(part.shards[largest].back());
        part.shards[largest].pop_back();
    }
    for (auto& shard : part.shards) std::sort(shard.begin(), shard.end());
    return part;
}

std::vector<double> label_distribution(const std::vector<int>& labels,
                                       const std::vector<int>& subset, int n_classes) {
    std::vector<double> dist(n_classes, 0.0);
    if (subset.empty()) throw std::invalid_argument("label_distribution: empty subset");
    for (int i : subset) dist[labels[i]] += 1.0;
    for (auto& d : dist) d /= static_cast<double>(subset.size());
    return dist;
}

namespace {

[[noreturn]] void pgm_fail(const std::string& path, const std::string& what, long offset) {
    throw std::runtime_error("pgm parse error in '" + path + "': " + what + " at byte " +
                             std::to_string(offset));
}

// Skips whitespace and '#' comment lines between header tokens.
void skip_pgm_space(std::istream& in) {
    for (;;) {
        int ch = in.peek();
        if (ch == '#') {
            while (ch != '\n' && ch != EOF) ch = in.get();
        } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            in.get();
        } else {
            return;
        }
    }
}

long read_pgm_int(std::istream& in, const std::string& path, const char* what) {
    skip_pgm_space(in);
    long pos = static_cast<long>(in.tellg());
    long v = 0;
    bool any = false;
    while (std::isdigit(in.peek())) {
        v = v * 10 + (in.get() - '0');
        any = true;
    }
    if (!any) pgm_fail(path, std::string("expected ") + what, pos);
    return v;
}

}  // namespace

Image load_pgm(const std::string& path, int image_size) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5') {
        std::string m = in.gcount() == 2 ? std::string(magic, 2) : std::string("<eof>");
        pgm_fail(path, "unsupported magic " + m, 0);
    }
    long width = read_pgm_int(in, path, "width");
    long height = read_pgm_int(in, path, "height");
    skip_pgm_space(in);
    long maxval_off = static_cast<long>(in.tellg());
    long maxval = read_pgm_int(in, path, "maxval");
    if (maxval != 255) pgm_fail(path, "unsupported maxval " + std::to_string(maxval), maxval_off);
    in.get();  // single whitespace byte before the raster

    long payload_off = static_cast<long>(in.tellg());
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        pgm_fail(path, "truncated payload (expected " + std::to_string(raw.size()) + " bytes, got " +
                           std::to_string(in.gcount()) + ")",
                 payload_off + static_cast<long>(in.gcount()));

    if (width < image_size || height < image_size)
        throw std::runtime_error("pgm '" + path + "' smaller than image_size");

    // Center crop to the largest square multiple of image_size, then pool.
    long block = std::min(width, height) / image_size;
    long side = block * image_size;
    long off_r = (height - side) / 2;
    long off_c = (width - side) / 2;

    Image img;
    img.side = image_size;
    img.px.resize(static_cast<std::size_t>(image_size) * image_size);
    const double denom = 255.0 * static_cast<double>(block) * static_cast<double>(block);
    for (int r = 0; r < image_size; ++r) {
        for (int c = 0; c < image_size; ++c) {
            double sum = 0.0;
            for (long i = 0; i < block; ++i)
                for (long j = 0; j < block; ++j) {
                    long rr = off_r + r * block + i;
                    long cc = off_c + c * block + j;
                    sum += raw[static_cast<std::size_t>(rr) * width + cc];
                }
            img.at(r, c) = sum / denom;
        }
    }
    return img;
}

void save_pgm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "P5\n" << img.side << " " << img.side << "\n255\n";
    for (double p : img.px) {
        double v = std::clamp(p, 0.0, 1.0);
        out.put(static_cast<char>(static_cast<int>(std::floor(v * 255.0 + 0.5))));
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Dataset load_pgm_directory(const std::string& dir, int image_size) {
    namespace fs = std::filesystem;
    std::vector<std::pair<std::string, int>> files;

    fs::path labels_path = fs::path(dir) / "labels.csv";
    if (fs::exists(labels_path)) {
        std::ifstream in(labels_path);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (first && line.rfind("filename", 0) == 0) {
                first = false;
                continue;
            }
            first = false;
            std::size_t comma = line.find(',');
            if (comma == std::string::npos)
                throw std::runtime_error("bad labels.csv line: '" + line + "'");
            files.emplace_back(line.substr(0, comma), std::stoi(line.substr(comma + 1)));
        }
    } else {
        for (const auto& ent : fs::directory_iterator(dir)) {
            if (ent.path().extension() != ".pgm") continue;
            std::string stem = ent.path().stem().string();
            std::size_t us = stem.rfind('_');
            if (us == std::string::npos)
                throw std::runtime_error("no labels.csv and no _<label> suffix in '" +
                                         ent.path().string() + "'");
            files.emplace_back(ent.path().filename().string(), std::stoi(stem.substr(us + 1)));
        }
        std::sort(files.begin(), files.end());
    }
    if (files.empty()) throw std::runtime_error("no dataset files in '" + dir + "'");

    std::vector<Example> ex;
    ex.reserve(files.size());
    for (const auto& [name, label] : files)
        ex.push_back(Example{load_pgm((fs::path(dir) / name).string(), image_size), label});
    return Dataset::from_examples(std::move(ex));
}

}  // namespace dsfl
