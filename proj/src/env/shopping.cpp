// Copyright 2026 The WKM Planner Authors. All Rights Reserved.
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

#include <algorithm>
#include <map>
#include <set>

#include "family.hpp"
#include "wkm/common/error.hpp"
#include "wkm/common/random.hpp"

namespace wkm::env::detail {

namespace {

const std::vector<std::string> kSeenCategories = {"shirt",   "mug",   "lamp",   "backpack",
                                                  "sneaker", "towel", "blanket"};
const std::vector<std::string> kUnseenCategories = {"jacket", "kettle",   "pillow",
                                                    "watch",  "umbrella", "helmet"};
const std::vector<std::string> kColors = {"black", "white", "red",    "blue",  "green",
                                          "grey",  "navy",  "yellow", "brown", "pink"};
const std::vector<std::string> kSizes = {"small", "medium", "large", "x-large"};

const std::vector<std::string> kSeenStores = {"Maple Street Goods", "Harbor Outfitters",
                                              "Copper Kettle Supply", "Northfield Market"};
const std::vector<std::string> kUnseenStores = {"Juniper Trading Post", "Silver Pine Emporium",
                                                "Lakeside Provisions", "Redwood Depot"};

constexpr int kLayoutsPerGroup = 4;
constexpr int kCategoriesPerLayout = 4;
constexpr int kProductsPerCategory = 3;

struct Layout {
  std::string store;
  std::vector<std::string> categories;
  std::vector<Product> products;
};

class Shopping final : public Family {
 public:
  explicit Shopping(std::uint64_t seed) {
    std::set<std::string> ids;
    for (Group g : {Group::kSeen, Group::kUnseen}) {
      for (int l = 0; l < kLayoutsPerGroup; ++l) layouts_[{g, l}] = make_layout(seed, g, l, ids);
    }
  }

  std::vector<Combo> pool(Group group) const override {
    std::vector<Combo> out;
    for (int l = 0; l < kLayoutsPerGroup; ++l) {
      for (const auto& p : layouts_.at({group, l}).products) {
        out.push_back({"buy_" + p.category, p.category, p.color, l});
      }
    }
    return out;
  }

  BuiltTask build(const Combo& combo, Group group, std::uint64_t target_seed,
                  std::uint64_t distractor_seed) const override {
    Rng target_rng(target_seed);
    Rng scene_rng(distractor_seed);
    const Layout& layout = layouts_.at({group, combo.layout});

    WorldState w;
    w.kind = EnvKind::kShopping;
    w.shop.categories = layout.categories;
    w.shop.products = layout.products;
    scene_rng.shuffle(w.shop.products);

    const int p = static_cast<int>(std::find_if(w.shop.products.begin(), w.shop.products.end(),
                                                [&](const Product& x) {
                                                  return x.category == combo.object &&
                                                         x.color == combo.dest;
                                                }) -
                                   w.shop.products.begin());
    if (p == static_cast<int>(w.shop.products.size())) {
      throw Error("shopping combo has no product: " + combo.key());
    }
    const Product& prod = w.shop.products[p];
    const std::string size = prod.sizes[target_rng.index(prod.sizes.size())];
    const int budget = prod.price + 5 + 5 * static_cast<int>(target_rng.index(4));

    auto sg = [&](SubgoalKind k, std::string value, bool terminal) {
      Subgoal g;
      g.kind = k;
      g.product = p;
      g.value = std::move(value);
      g.terminal = terminal;
      return g;
    };
    Subgoal bought = sg(SubgoalKind::kPurchased, "", true);
    bought.color = prod.color;
    bought.size = size;
    w.subgoals = {sg(SubgoalKind::kSearched, prod.category, false),
                  sg(SubgoalKind::kViewing, "", false),
                  sg(SubgoalKind::kColorChosen, prod.color, false),
                  sg(SubgoalKind::kSizeChosen, size, false), bought};
    w.achieved.assign(w.subgoals.size(), false);

    BuiltTask out;
    std::string departments;
    for (std::size_t i = 0; i < layout.categories.size(); ++i) {
      if (i > 0) departments += ", ";
      departments += layout.categories[i];
    }
    out.observation = "You are on the home page of " + layout.store + ". Departments: " +
                      departments + ".";
    out.instruction = out.observation + " Your task is to: buy a " + prod.color + " " +
                      prod.category + " in size " + size + ", priced lower than " +
                      std::to_string(budget) + " dollars.";

    PlanRecorder rec(w);
    rec.emit("search[" + prod.category + "]",
             "I should search the " + prod.category + " department first.");
    rec.emit("click[" + prod.id + "]",
             "Item " + prod.id + " is a " + prod.color + " " + prod.category +
                 " within budget. I will open it.");
    rec.emit("click[" + prod.color + "]", "I need to select the color " + prod.color + ".");
    rec.emit("click[" + size + "]", "I need to select the size " + size + ".");
    rec.emit("buy now", "All options are set, so I can buy it now.");
    out.plan = std::move(rec.plan);
    out.rationales = std::move(rec.rationales);
    out.world = std::move(w);
    return out;
  }

 private:
  static Layout make_layout(std::uint64_t seed, Group g, int l, std::set<std::string>& ids) {
    const bool seen = g == Group::kSeen;
    Rng rng(derive_seed(seed, std::string("shopping/layout/") + (seen ? "seen/" : "unseen/") +
                                  std::to_string(l)));
    Layout out;
    out.store = (seen ? kSeenStores : kUnseenStores)[static_cast<std::size_t>(l)];
    std::vector<std::string> cats = seen ? kSeenCategories : kUnseenCategories;
    rng.shuffle(cats);
    cats.resize(kCategoriesPerLayout);
    std::sort(cats.begin(), cats.end());
    out.categories = cats;
    for (const auto& c : cats) {
      std::vector<std::string> colors = kColors;
      rng.shuffle(colors);
      for (int i = 0; i < kProductsPerCategory; ++i) {
        Product p;
        do {
          p.id = "b0" + std::to_string(100 + rng.index(900));
        } while (!ids.insert(p.id).second);
        p.category = c;
        p.color = colors[static_cast<std::size_t>(i)];
        // The primary color plus two alternatives drawn past the primaries.
        p.colors = {p.color, colors[kProductsPerCategory + 2 * i],
                    colors[kProductsPerCategory + 2 * i + 1]};
        std::sort(p.colors.begin(), p.colors.end());
        const std::size_t first = rng.index(2);
        p.sizes.assign(kSizes.begin() + static_cast<std::ptrdiff_t>(first),
                       kSizes.begin() + static_cast<std::ptrdiff_t>(first + 3));
        p.price = 10 + 5 * static_cast<int>(rng.index(15));
        out.products.push_back(std::move(p));
      }
    }
    return out;
  }

  std::map<std::pair<Group, int>, Layout> layouts_;
};

}  // namespace

std::unique_ptr<Family> make_shopping(std::uint64_t suite_seed) {
  return std::make_unique<Shopping>(suite_seed);
}

}  // namespace wkm::env::detail
