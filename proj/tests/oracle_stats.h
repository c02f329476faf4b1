// Copyright 2026 The ToxExplain Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Frozen paired t-test statistics and a brute-force LCS.

#ifndef TOXEXPLAIN_TESTS_ORACLE_STATS_H_
#define TOXEXPLAIN_TESTS_ORACLE_STATS_H_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace toxexplain::testing {

struct TTestFixture {
  std::vector<double> a;
  std::vector<double> b;
  double t;
  double p;
  double effect;
};

// Frozen from scipy.stats.ttest_rel; effect = mean(d) / std(d, ddof=1).
inline const std::vector<TTestFixture> &TTestFixtures() {
  static const std::vector<TTestFixture> fixtures = {
    {{42.069, 52.406, 31.037, 63.958, 56.383, 47.08, 46.881, 53.038, 47.323, 47.741},
     {43.613, 52.214, 30.781, 64.441, 54.541, 45.869, 48.526, 52.647, 43.2, 46.309},
     1.0713094191177062, 0.3119167145017875, 0.3387777843203886},
    {{56.566, 47.677},
     {48.12, 41.603},
     6.121416526138264, 0.10308817318317864, 4.3284951360997646},
    {{42.868, 63.482, 37.7, 51.75, 38.305, 63.515, 58.339, 61.377, 41.145, 56.846, 44.81, 45.426, 55.065, 58.767, 52.044, 43.72, 41.742, 64.443, 55.939, 57.197, 71.835, 41.841, 75.595, 81.509, 66.184, 58.271, 43.362, 59.945, 45.573, 49.783},
     {41.497, 63.833, 41.064, 49.583, 34.849, 60.006, 54.934, 56.584, 37.906, 60.226, 42.53, 45.697, 50.914, 58.776, 46.322, 41.124, 48.006, 62.194, 58.799, 58.062, 70.876, 39.385, 78.956, 80.477, 70.266, 55.614, 43.034, 60.841, 46.192, 45.582},
     1.489105706091148, 0.14725521539486983, 0.2718722619119266},
    {{48.04, 41.463, 56.773, 55.88, 30.429, 31.947, 37.184, 51.173, 70.332},
     {38.893, 34.215, 45.584, 44.739, 16.557, 23.862, 32.026, 42.103, 66.521},
     8.395304831146218, 3.080925932041665e-05, 2.7984349437154057},
    {{49.636, 55.173, 54.874, 61.478, 41.98, 27.12, 51.147, 43.883, 49.728, 66.643, 38.972, 57.648, 59.459, 54.607, 61.185, 45.416, 43.185, 60.39},
     {49.797, 57.344, 53.511, 64.349, 39.134, 21.939, 43.036, 38.579, 50.184, 60.248, 35.615, 61.968, 59.999, 57.98, 56.21, 36.036, 45.734, 54.139},
     2.0275677531708864, 0.05857796966046233, 0.47790230252743515},
    {{52.171, 40.511, 65.526, 65.493, 55.514, 49.705, 51.914, 39.041, 47.609, 48.951, 41.478, 58.492, 35.735, 45.466, 27.471, 54.968, 57.426, 56.213, 79.181, 59.398, 40.58, 76.635, 40.797, 57.887},
     {53.9, 37.372, 69.212, 66.057, 56.727, 47.178, 55.322, 35.958, 41.772, 52.726, 39.698, 58.122, 41.003, 48.375, 28.869, 57.678, 54.743, 57.972, 82.011, 61.164, 39.468, 64.893, 41.969, 57.732},
     -0.09707363127972114, 0.9235088753201169, -0.019815072009532766},
    {{57.781, 52.657},
     {58.393, 48.206},
     0.7582460991507002, 0.5869879843184241, 0.5361609585177074},
    {{53.705, 50.761, 51.387, 51.663, 54.115, 50.361, 51.578, 52.561, 59.294, 44.853, 57.864, 56.364, 51.054},
     {52.28, 51.868, 53.979, 48.438, 54.301, 50.555, 49.594, 50.703, 54.641, 41.544, 53.252, 54.514, 49.374},
     2.644297461303491, 0.021403252554244273, 0.7333961603314608},
    {{53.718, 48.124, 42.711, 42.781, 38.685, 48.038, 47.859, 66.23, 65.342, 64.779, 70.792, 37.829, 56.73, 57.611, 54.762, 71.267, 75.379, 59.794, 56.531, 38.776, 38.796, 57.002},
     {52.991, 43.632, 41.839, 43.361, 40.993, 47.215, 46.551, 65.749, 65.361, 60.79, 72.792, 43.9, 58.673, 52.766, 54.546, 65.47, 69.391, 61.272, 56.264, 36.215, 32.034, 52.695},
     1.921158851577558, 0.06839029214233878, 0.4095924433892572},
    {{50.319, 56.897, 65.234, 46.607, 54.69, 48.622},
     {40.829, 48.163, 60.116, 35.522, 50.113, 45.054},
     5.666843222509468, 0.002380224506073353, 2.3134790579162186},
    {{52.549, 35.882, 73.605, 59.789, 51.723, 50.574, 54.51, 43.488, 52.833},
     {49.778, 37.374, 71.57, 62.476, 51.362, 51.38, 63.393, 45.901, 53.636},
     -1.1736675008758526, 0.274283469232513, -0.3912225002919508},
    {{43.647, 39.608, 60.842, 66.023, 50.644, 66.768, 48.877, 32.269, 43.468, 39.43, 47.255, 56.27, 40.71, 49.198, 51.994, 42.67, 40.907, 50.872, 58.724, 43.968, 42.486, 48.587, 52.899, 44.57},
     {40.645, 36.914, 55.585, 63.49, 46.964, 69.518, 45.325, 31.64, 42.607, 34.076, 41.508, 52.934, 40.698, 45.478, 48.026, 31.969, 37.716, 49.809, 58.058, 43.256, 39.502, 45.906, 53.396, 42.163},
     5.1060034725721595, 3.587565169199574e-05, 1.042258594390066},
    {{60.2, 39.223, 63.753, 66.941, 57.624, 59.041, 68.578, 38.979, 52.539, 52.391, 40.329, 70.118, 44.193, 42.688, 52.677, 60.311, 43.99, 44.004},
     {53.712, 26.946, 53.435, 56.426, 48.321, 50.614, 66.111, 33.701, 44.606, 43.717, 34.952, 63.403, 38.867, 38.831, 41.652, 45.552, 35.925, 36.242},
     11.094348570561129, 3.309913022497254e-09, 2.6149630356970186},
    {{44.012, 47.674, 55.587, 56.126, 63.31, 28.337, 33.513, 64.619, 56.082, 57.934, 47.152, 45.258, 51.998, 40.602, 34.698, 38.894, 51.165, 56.372, 66.513, 53.718, 54.725, 66.881, 42.233, 40.407, 44.621, 49.038, 70.232, 46.512},
     {47.933, 46.256, 57.061, 58.17, 64.909, 30.59, 31.446, 68.987, 59.025, 55.828, 48.669, 42.039, 52.283, 37.089, 36.853, 47.787, 55.578, 58.564, 63.804, 54.859, 58.279, 66.616, 42.621, 35.324, 42.055, 43.493, 75.975, 47.93},
     -1.229206013332434, 0.22959983310536727, -0.23229810152448327},
    {{47.973, 35.393, 51.76, 43.635, 40.302, 50.554, 51.098, 48.195, 42.257, 40.141, 50.063, 62.225, 33.957, 43.428, 48.376, 48.413, 44.072, 69.285, 53.998, 40.146, 31.179, 48.279, 64.795, 51.928, 26.84},
     {35.842, 27.762, 46.963, 36.058, 32.75, 45.773, 46.867, 38.165, 35.571, 29.269, 38.833, 55.99, 21.687, 35.938, 41.319, 42.997, 32.621, 62.427, 45.622, 36.604, 20.951, 36.949, 58.296, 41.361, 14.957},
     15.202370589422298, 8.106059722422325e-14, 3.0404741178844596},
    {{54.304, 18.886, 40.79, 38.92, 56.443, 64.726, 70.581, 57.061, 39.04, 38.687},
     {51.446, 20.354, 44.586, 33.167, 58.271, 67.51, 71.529, 66.77, 40.646, 38.784},
     -1.0621003321190206, 0.31585764835858066, -0.33586561531173953},
    {{44.558, 39.007, 54.222, 61.536, 47.651},
     {47.335, 37.88, 59.116, 62.18, 49.254},
     -1.738276083563198, 0.15715439368195427, -0.7773806973018832},
    {{36.479, 48.179, 68.405, 50.365, 64.026, 58.841},
     {30.996, 50.301, 65.14, 51.149, 62.779, 58.906},
     1.0244137045868493, 0.3526216412336944, 0.418215143625334},
    {{52.427, 45.517, 36.49, 39.9, 59.162, 67.245, 52.326, 58.423, 59.769, 36.342, 31.273, 49.487, 31.077, 47.275, 35.218},
     {48.555, 41.263, 36.05, 35.958, 53.719, 65.391, 59.228, 57.901, 51.934, 34.616, 36.986, 47.994, 32.919, 48.605, 36.783},
     0.9065409466139852, 0.37998813315303626, 0.23406786592607143},
    {{52.826, 48.157, 47.215, 51.203},
     {54.107, 44.33, 46.374, 51.081},
     0.8141908342456872, 0.4751572006559789, 0.4070954171228436},
  };
  return fixtures;
}

// Brute-force LCS: try every subsequence of the shorter side.
inline size_t SubsetLcs(const std::vector<std::string> &a, const std::vector<std::string> &b) {
  size_t best = 0;
  for (uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    std::vector<std::string> sub;
    for (size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(a[i]);
    }
    size_t j = 0;
    for (size_t i = 0; i < b.size() && j < sub.size(); ++i) {
      if (b[i] == sub[j]) ++j;
    }
    if (j == sub.size()) best = std::max(best, sub.size());
  }
  return best;
}

}  // namespace toxexplain::testing

#endif  // TOXEXPLAIN_TESTS_ORACLE_STATS_H_
