#pragma once

// Published example posts, conceptualisations and model outputs, quoted
// verbatim for use as fixtures.

#include "costar/grammar.hpp"

#include <string>
#include <vector>

namespace costar::testing {

struct ConceptExample {
    std::string post;
    std::string concept_text;
};

inline const std::vector<ConceptExample>& concept_examples() {
    static const std::vector<ConceptExample> v = {
        {"All-female casts bother me but I have literally never noticed the hundreds of movies "
         "with 0 female characters I have already watched",
         "actor gender preference"},
        {"As expected, when the terrorist group Hamas won the election in Gaza it was the usual "
         "one man, one vote, one time, Islamist election. #Islam",
         "authoritarian government"},
        {"Black guy in class: *attempts to throw a paper ball into the trash* *misses* Mrs. Mundy: "
         "\"You're a disgrace to your race, Marcus\"",
         "athletic skill"},
        {"How can a Libtard speak truth to power when the only thing they vomit from their mouths "
         "is lies?",
         "incompetent policymaking"},
        {"I hate fat bitches", "physical appearance"},
    };
    return v;
}

struct GenerationExample {
    std::string label; ///< a..e
    std::string post;
    std::vector<std::string> cs;
    std::vector<std::string> sc;
    std::vector<std::string> s;
    std::vector<std::string> references;
};

inline const std::vector<GenerationExample>& generation_examples() {
    static const std::vector<GenerationExample> v = {
        {"a",
         "That's not what a real man would do.",
         {"sexism [SEP] men are shallow", "gender roles [SEP] men should be men",
          "gender roles [SEP] men should be masculine"},
         {"men are bad at following norms [SEP] gender norms",
          "men are bad at following norms [SEP] sexism", "men are stupid [SEP] mental abilities"},
         {"men are stupid", "men are shallow", "men should not do anything"},
         {"men need to act manly"}},
        {"b",
         "Why do Japanese people never play bingo? They all disappear after they hear B-29",
         {"japanese hate planes [SEP] hiroshima and nagasaki victims are marginalized for a joke",
          "japanese hate planes [SEP] hiroshima and nagasaki are marginalized for a joke",
          "japanese military [SEP] nagasaki victims are marginalized for a joke"},
         {"japanese folks are marginalized for a joke [SEP] war",
          "japanese folks are marginalized for a joke [SEP] bombing",
          "japanese folks are marginalized for a joke [SEP] war crimes"},
         {"japanese folks are marginalized for a joke", "japanese folks have been killed in action",
          "japanese folks have been killed in the holocaust"},
         {"trivializes harm to victims", "japanese got bombed to end ww2",
          "japanese offended by nuke jokes"}},
        {"c",
         "If your angry punch a black kid What they gonna do tell their fathers?",
         {"domestic violence [SEP] black fathers are abusive to their children",
          "domestic violence [SEP] black fathers are violent to their children",
          "domestic violence [SEP] black fathers are abusive"},
         {"black folks are inferior to other races [SEP] racial hierarchy",
          "black folks are inferior [SEP] racial hierarchy",
          "black folks are inferior to whites [SEP] racial hierarchy"},
         {"black fathers are not able to provide for their children",
          "black fathers are not present in their children's lives",
          "black fathers do not have fathers"},
         {"dad's abandon them", "no one cares for them", "black fathers abandon their kids",
          "blacks come from single mother homes", "black people don't have fathers",
          "black men do not provide for their family"}},
        {"d",
         "Women have as much self control in the presence of Chad trying to fuck them as we would "
         "in the presence of a hot woman trying to fuck us. Zero.",
         {"gender hierarchy [SEP] women are dependent on men",
          "sexism [SEP] women are subservient to men",
          "gender hierarchy [SEP] women are dependent on men for sex"},
         {"women are incapable of controlling themselves [SEP] sexism",
          "women are incapable of controlling their sexuality [SEP] sexism",
          "women are incapable of controlling their sexual urges [SEP] sexism"},
         {"women should be submissive", "women are incapable of controlling themselves",
          "women are defined by their sexuality"},
         {"women can't resist sex", "women have no control",
          "women don't choose sexual partners well",
          "women are biased on looks when it comes to finding a mate",
          "women are hypocritical about their sexual desire",
          "women can't control themselves with attractive men"}},
        {"e",
         "What works better than a pacifier and is more convenient? My penis",
         {"pedophilia [SEP] children are sex objects",
          "sexual assault [SEP] rape victims are marginalized for a joke",
          "pedophilia [SEP] victims of pedophilia are made fun of"},
         {"men should be beaten [SEP] domestic violence",
          "men are inferior to women [SEP] gender hierarchy",
          "men should have sex with their penises [SEP] sexual activity"},
         {"men are better off dead", "men are better spanking their wives",
          "men want sex with pacifiers"},
         {"advocates child molestation", "makes light of child abuse"}},
    };
    return v;
}

inline const std::vector<std::string>& outputs_for(const GenerationExample& e, Scheme scheme) {
    switch (scheme) {
    case Scheme::CS: return e.cs;
    case Scheme::SC: return e.sc;
    case Scheme::S: return e.s;
    }
    return e.s;
}

} // namespace costar::testing
