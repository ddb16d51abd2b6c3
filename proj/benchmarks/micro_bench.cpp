// SPDX-License-Identifier: Apache-2.0
//
// Micro-benchmarks for the hot paths: store membership checks, text
// featurization, and BM25 scoring.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <litmine/corpus.hpp>
#include <litmine/features.hpp>
#include <litmine/index.hpp>
#include <litmine/sha1.hpp>
#include <litmine/store.hpp>

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("litmine_bench_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::vector<std::string> make_keys(std::size_t n) {
  std::vector<std::string> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys.push_back(litmine::sha1_hex("key" + std::to_string(i)) + ".json");
  }
  return keys;
}

void bm_store_exists(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto root = scratch_dir("exists_" + std::to_string(n));
  litmine::store::Store store(root);
  auto keys = make_keys(n);
  for (const auto& k : keys) store.put(litmine::store::BucketId::staging, k, "x");

  std::mt19937_64 rng(1);
  for (auto _ : state) {
    const auto& k = keys[rng() % keys.size()];
    benchmark::DoNotOptimize(store.exists(litmine::store::BucketId::staging, k));
  }
  std::filesystem::remove_all(root);
}
BENCHMARK(bm_store_exists)->Arg(1000)->Arg(100000);

litmine::idx::IndexedDoc to_indexed(const litmine::ArticleDoc& a, std::string category) {
  litmine::idx::IndexedDoc d;
  d.doc_id = litmine::sha1_hex(a.title);
  d.title = a.title;
  d.abstract_text = a.abstract_text;
  d.body_text = a.body_text;
  d.category = std::move(category);
  d.countries = a.countries();
  d.source = a.source;
  d.publish_time = a.publish_time;
  return d;
}

void bm_featurize(benchmark::State& state) {
  auto doc = litmine::bench::make_synthetic_doc(7, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(litmine::feat::featurize(doc));
  }
}
BENCHMARK(bm_featurize);

void bm_bm25_search(benchmark::State& state) {
  auto root = scratch_dir("search");
  litmine::idx::Index index(root);
  for (std::size_t i = 0; i < 2000; ++i) {
    auto doc = litmine::bench::make_synthetic_doc(7, i);
    index.add(litmine::idx::analyze(to_indexed(doc, "vaccine")));
  }
  index.commit();
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.search("vaccine efficacy trial", 10));
  }
  std::filesystem::remove_all(root);
}
BENCHMARK(bm_bm25_search);

}  // namespace

BENCHMARK_MAIN();
