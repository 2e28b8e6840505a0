#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kpa/random.hpp"

namespace kpa::testing {

namespace {

const std::vector<std::string>& content_words() {
  static const std::vector<std::string> words = {
      "children", "safety",   "economy",  "freedom",  "health",   "privacy",  "science",  "jobs",
      "taxes",    "schools",  "families", "crime",    "religion", "rights",   "prices",   "energy",
      "climate",  "farmers",  "doctors",  "soldiers", "workers",  "students", "parents",  "voters",
      "courts",   "markets",  "borders",  "culture",  "history",  "language", "housing",  "transit",
      "water",    "forests",  "oceans",   "animals",  "vaccines", "hospitals", "museums", "sports",
      "media",    "internet", "banks",    "pensions", "prisons",  "police",   "tourism",  "fashion",
  };
  return words;
}

const std::vector<std::string>& fillers() {
  static const std::vector<std::string> f = {"clearly", "really", "honestly", "surely"};
  return f;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string phrase(std::vector<std::string> words, Rng& rng) {
  for (std::size_t k = words.size(); k > 1; --k) std::swap(words[k - 1], words[uniform_index(rng, k)]);
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

}  // namespace

Dataset make_synthetic_dataset(const SyntheticSpec& spec) {
  const auto& vocab = content_words();
  Rng rng(splitmix64(spec.seed));
  Dataset d;
  std::size_t arg_counter = 0;
  std::size_t kp_counter = 0;
  for (std::size_t t = 0; t < spec.topics; ++t) {
    const std::string topic = "Synthetic topic " + std::to_string(t) + " should be adopted.";
    for (Stance stance : {Stance::Pro, Stance::Con}) {
      TopicStanceGroup g;
      g.key = {topic, stance};
      // Words of each key point, taken from a rotated copy of the vocabulary.
      const std::size_t offset = (t * 2 + (stance == Stance::Con ? 1 : 0)) * 5;
      std::vector<std::vector<std::string>> kp_words(spec.key_points_per_group);
      for (std::size_t k = 0; k < spec.key_points_per_group; ++k) {
        for (std::size_t w = 0; w < 4; ++w) {
          kp_words[k].push_back(vocab[(offset + k * 4 + w) % vocab.size()]);
        }
        char id[32];
        std::snprintf(id, sizeof id, "kp_%03zu", kp_counter++);
        std::string text = capitalize(kp_words[k][0] + " " + kp_words[k][1] + " and " + kp_words[k][2] +
                                      " " + kp_words[k][3] + " matter");
        g.reference_kps.push_back({id, topic, stance, text});
      }

      const std::size_t total = spec.key_points_per_group * spec.arguments_per_key_point;
      const auto n_multi = static_cast<std::size_t>(std::llround(spec.multi_fraction * static_cast<double>(total)));
      std::size_t multi_done = 0;
      for (std::size_t k = 0; k < spec.key_points_per_group; ++k) {
        for (std::size_t a = 0; a < spec.arguments_per_key_point; ++a) {
          char id[32];
          std::snprintf(id, sizeof id, "arg_%05zu", arg_counter++);
          std::vector<std::string> words = kp_words[k];
          words.push_back(fillers()[a % fillers().size()]);
          std::optional<std::size_t> second;
          // Spread multi-key-point arguments over key points: round r uses
          // argument slot r of every key point, pairing k with k + 1 + r.
          const std::size_t round = a;
          if (multi_done < n_multi && round * spec.key_points_per_group + k < n_multi) {
            second = (k + 1 + round) % spec.key_points_per_group;
            for (const auto& w : kp_words[*second]) words.push_back(w);
            ++multi_done;
          }
          g.arguments.push_back({id, topic, stance, "we should act because " + phrase(words, rng)});
          g.labels.push_back({id, g.reference_kps[k].kp_id, true});
          if (second) g.labels.push_back({id, g.reference_kps[*second].kp_id, true});
        }
      }
      std::sort(g.labels.begin(), g.labels.end(), [](const MatchLabel& x, const MatchLabel& y) {
        return std::tie(x.arg_id, x.kp_id) < std::tie(y.arg_id, y.kp_id);
      });
      d.groups.push_back(std::move(g));
    }
  }
  std::sort(d.groups.begin(), d.groups.end(),
            [](const TopicStanceGroup& a, const TopicStanceGroup& b) { return a.key < b.key; });
  return d;
}

}  // namespace kpa::testing
