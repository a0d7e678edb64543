// Copyright 2026 The lsscore Authors.
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

#include "lsscore/synthetic.h"

#include <algorithm>
#include <random>

#include "lsscore/error.h"
#include "lsscore/negatives.h"
#include "lsscore/random.h"

namespace lsscore {
namespace {

using Slots = std::map<std::string, std::string>;

struct StoryFamily {
  std::vector<std::string> document;  // in narrative order
  std::vector<std::string> reference; // first two always used, third optional
};

const std::vector<StoryFamily>& Families() {
  static const std::vector<StoryFamily> kFamilies = {
      {{
           "{first} {last} from {place} filmed her {breed} {pet} performing a very skillful trick.",
           "The {age}-year-old dog has been practising the routine in the back garden for {small} months.",
           "Footage shows the pup taking the {toy} from her mouth with her paws and holding it up high in the air.",
           "{first} said that {pet} learned the trick after watching the neighbour's children play.",
           "The video has been viewed more than {count} thousand times since it was posted on {day}.",
           "Many viewers left comments praising the patience of both the owner and the dog.",
           "{pet} 's owner says she loves playing with balls.",
           "Local trainers in {place} said such tricks take weeks of careful work.",
           "The family plans to enter {pet} in a talent show next {season}.",
           "She then carefully lowers the {toy} back down to the starting point.",
           "A vet who watched the clip said the dog appeared healthy and relaxed.",
           "{first} hopes the video will encourage other owners to train their pets.",
       },
       {
           "{first} {last} from {place} filmed her {breed} {pet} performing a clever trick.",
           "Footage shows the pup holding the {toy} up high in the air with her paws.",
           "She then lowers it carefully back down to the starting point.",
       }},
      {{
           "A new {shop} opened on the main street of {place} on {day} morning.",
           "The owner, {first} {last}, spent {small} years saving money to buy the building.",
           "More than {count} customers queued outside before the doors opened.",
           "{first} said the idea came from a trip abroad with her family.",
           "The building had been empty since the old post office closed.",
           "Neighbours said the street had felt quiet for a long time.",
           "The {shop} will employ {small} people from the local area.",
           "The mayor of {place} attended the opening and cut a red ribbon.",
           "Prices were kept low during the first week to attract new visitors.",
           "{first} plans to open a second branch next {season} if trade stays strong.",
           "Several other businesses on the street reported more visitors that day.",
           "A local newspaper described the queue as the longest in years.",
       },
       {
           "{first} {last} opened a new {shop} in {place} on {day}.",
           "More than {count} customers queued outside before the doors opened.",
           "The {shop} will create {small} jobs for local people.",
       }},
      {{
           "{team} beat {rival} by {goals} goals to nil in a tense match on {day} night.",
           "The winning goal was scored by striker {first} {last} in the second half.",
           "Around {count} thousand fans filled the stadium in {place} despite the cold.",
           "{rival} had the better chances early on but could not find the net.",
           "The coach said his players showed great spirit after a difficult month.",
           "{last} has now scored in {small} games in a row for the club.",
           "The result moves {team} up to third place in the league table.",
           "Police said the crowd was well behaved and no arrests were made.",
           "{rival} will play their next game at home on {day}.",
           "Tickets for the next home match went on sale the following morning.",
           "The club doctor said two players would be checked for minor injuries.",
           "Supporters sang in the streets of {place} long after the final whistle.",
       },
       {
           "{team} beat {rival} by {goals} goals to nil on {day}.",
           "Striker {first} {last} scored the winning goal in the second half.",
           "The win lifts {team} to third place in the league.",
       }},
      {{
           "Scientists at the university of {place} have found that {creature} can recognise human faces.",
           "The study, led by professor {first} {last}, lasted {small} years.",
           "Researchers showed the animals photographs of people they had met before.",
           "The {creature} chose familiar faces in most of the trials.",
           "The team tested more than {count} animals during the project.",
           "Professor {last} said the result surprised many of her colleagues.",
           "Earlier work had suggested that only larger animals could do this.",
           "The findings were published in a science journal on {day}.",
           "Other experts said the research should be repeated with bigger groups.",
           "The university hopes to begin a follow-up study next {season}.",
           "Funding for the project came from a national research council.",
           "Students helped to record the behaviour of the animals each morning.",
       },
       {
           "Scientists in {place} have found that {creature} can recognise human faces.",
           "The study was led by professor {first} {last} and lasted {small} years.",
           "The {creature} chose familiar faces in most of the trials.",
       }},
      {{
           "A powerful {storm} hit {place} on {day}, closing roads and schools.",
           "Forecasters had warned residents to stay indoors for at least {small} days.",
           "About {count} thousand homes lost power during the night.",
           "Emergency crews worked through the night to clear fallen trees.",
           "{first} {last}, who runs a farm near {place}, said she had never seen anything like it.",
           "Several flights were cancelled at the regional airport.",
           "The local council opened shelters in {small} school halls.",
           "No serious injuries were reported by the hospital.",
           "Officials expect the clean-up to take several weeks.",
           "The last storm of this size struck the region {goals} decades ago.",
           "Volunteers handed out blankets and hot food to families in need.",
           "Power companies said most homes should be reconnected by the weekend.",
       },
       {
           "A powerful {storm} hit {place} on {day}, closing roads and schools.",
           "About {count} thousand homes lost power during the night.",
           "No serious injuries were reported.",
       }},
      {{
           "The annual {festival} in {place} raised more than {count} thousand dollars for charity this year.",
           "Organiser {first} {last} said it was the most successful event so far.",
           "Visitors enjoyed music, games and food stalls over {small} days.",
           "The money will be used to repair the children's playground in the town park.",
           "Hundreds of volunteers helped to set up tents and clean the grounds.",
           "The weather stayed dry for most of the weekend.",
           "Local bands played on a stage beside the river.",
           "{last} thanked the sponsors and every person who bought a ticket.",
           "A prize was given to the family who travelled the furthest.",
           "Next year the {festival} will move to a larger field near {place}.",
           "The police said traffic had been heavy but calm on {day}.",
           "Shops in the town centre reported their busiest weekend of the {season}.",
       },
       {
           "The {festival} in {place} raised more than {count} thousand dollars for charity.",
           "Organiser {first} {last} called it the most successful event so far.",
           "The money will repair the children's playground in the town park.",
       }},
  };
  return kFamilies;
}

const std::map<std::string, std::vector<std::string>>& SlotValues() {
  static const std::map<std::string, std::vector<std::string>> kValues = {
      {"first", {"Kristina", "Daniel", "Maria", "James", "Aisha", "Tom", "Elena", "Samuel",
                 "Priya", "Lucas", "Hannah", "Omar", "Grace", "Victor", "Nina", "Peter"}},
      {"last", {"Patrick", "Johnson", "Garcia", "Wilson", "Khan", "Brown", "Novak", "Turner",
                "Singh", "Moreau", "Fischer", "Reyes", "Clarke", "Okafor", "Murphy", "Lund"}},
      {"place", {"Alaska", "Texas", "Ohio", "Oregon", "Maine", "Nevada", "Florida", "Vermont",
                 "Denver", "Leeds", "Dublin", "Bristol", "Toronto", "Perth"}},
      {"day", {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"}},
      {"season", {"spring", "summer", "autumn", "winter"}},
      {"small", {"two", "three", "four", "five", "six", "seven", "eight", "nine"}},
      {"goals", {"two", "three", "four", "five"}},
      {"age", {"two", "three", "four", "five", "six"}},
      {"count", {"ten", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty"}},
      {"breed", {"German Shepherd", "Border Collie", "Labrador", "Beagle", "Husky", "Poodle"}},
      {"pet", {"Pakak", "Max", "Bella", "Rocky", "Luna", "Charlie", "Daisy", "Milo"}},
      {"toy", {"ball", "frisbee", "stick", "bone"}},
      {"shop", {"bakery", "bookshop", "cafe", "bike shop", "flower shop", "toy store"}},
      {"team", {"United", "Rovers", "City", "Athletic", "Wanderers", "Albion"}},
      {"creature", {"crows", "honey bees", "sheep", "pigeons", "goats", "squirrels"}},
      {"storm", {"storm", "blizzard", "flood", "hurricane"}},
      {"festival", {"music festival", "food fair", "book fair", "summer fair"}},
  };
  return kValues;
}

std::string Fill(const std::string& tmpl, const Slots& slots) {
  std::string out;
  for (size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] == '{') {
      size_t close = tmpl.find('}', i);
      out += slots.at(tmpl.substr(i + 1, close - i - 1));
      i = close + 1;
    } else {
      out.push_back(tmpl[i++]);
    }
  }
  return out;
}

std::string Join(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s;
  }
  return out;
}

}  // namespace

std::vector<DocRefPair> GenerateSyntheticCorpus(size_t count, uint64_t seed) {
  const auto& families = Families();
  const auto& values = SlotValues();
  std::vector<DocRefPair> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    Rng rng(DeriveSeed(seed, {i}));
    auto pick = [&](const std::vector<std::string>& v) {
      return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
    };
    const StoryFamily& fam = families[i % families.size()];
    Slots slots;
    for (const auto& [key, options] : values) slots[key] = pick(options);
    do {
      slots["rival"] = pick(values.at("team"));
    } while (slots["rival"] == slots["team"]);

    // Keep 8-12 document sentences in narrative order; the opening sentence
    // always survives.
    const size_t keep = std::uniform_int_distribution<size_t>(8, fam.document.size())(rng);
    std::vector<size_t> rest(fam.document.size() - 1);
    for (size_t j = 0; j < rest.size(); ++j) rest[j] = j + 1;
    std::vector<size_t> chosen = {0};
    std::sample(rest.begin(), rest.end(), std::back_inserter(chosen), keep - 1, rng);
    std::vector<std::string> doc;
    for (size_t j : chosen) doc.push_back(Fill(fam.document[j], slots));

    const size_t ref_len = std::bernoulli_distribution(0.5)(rng) ? 3 : 2;
    std::vector<std::string> ref;
    for (size_t j = 0; j < ref_len; ++j) ref.push_back(Fill(fam.reference[j], slots));

    out.push_back({"synth-" + std::to_string(i), Join(doc), Join(ref)});
  }
  return out;
}

std::vector<RatedSummary> BuildOrderedRatedSet(std::span<const DocRefPair> pairs, uint64_t seed) {
  std::vector<RatedSummary> out;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const DocRefPair& p = pairs[i];
    NegativeSet set;
    try {
      set = GenerateSet(p.reference, p.document, DeriveSeed(seed, {i}), p.id);
    } catch (const DataError&) {
      continue;
    }
    auto add = [&](const std::string& system, const std::string& text, double rating) {
      out.push_back({p.id + "/" + system, p.id, system, text, {{"quality", rating}}});
    };
    add("original", p.reference, 4);
    add("add_redundant", set[NegativeKind::kAddRedundant].text, 3);
    add("delete", set[NegativeKind::kDelete].text, 2);
    add("shuffle", set[NegativeKind::kShuffle].text, 1);
  }
  return out;
}

std::map<std::string, std::string> DocumentsById(std::span<const DocRefPair> pairs) {
  std::map<std::string, std::string> out;
  for (const auto& p : pairs) out[p.id] = p.document;
  return out;
}

std::map<std::string, std::string> ReferencesById(std::span<const DocRefPair> pairs) {
  std::map<std::string, std::string> out;
  for (const auto& p : pairs) out[p.id] = p.reference;
  return out;
}

}  // namespace lsscore
