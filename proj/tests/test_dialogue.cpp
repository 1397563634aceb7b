// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "cqa/dialogue.hpp"

namespace {

bool has_code(const cqa::ValidationReport& r, const std::string& code) {
    for (const auto& v : r) {
        if (v.code == code) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("mode enums round-trip through their string forms", "[dialogue]") {
    using cqa::AgentAgentMode;
    using cqa::AgentEnvMode;
    for (auto m : {AgentAgentMode::CONFLICT_RESOLUTION, AgentAgentMode::NEGOTIATION,
                   AgentAgentMode::SUPPLEMENTATION, AgentAgentMode::PROMPTING}) {
        CHECK(cqa::agent_agent_mode_from_string(cqa::to_string(m)) == m);
    }
    for (auto m : {AgentEnvMode::EXPRESS_REQUIREMENTS, AgentEnvMode::RECEIVE_FEEDBACK}) {
        CHECK(cqa::agent_env_mode_from_string(cqa::to_string(m)) == m);
    }
    CHECK(cqa::to_string(AgentAgentMode::CONFLICT_RESOLUTION) == "conflict_resolution");
    CHECK(cqa::to_string(AgentEnvMode::RECEIVE_FEEDBACK) == "receive_feedback");
    CHECK_THROWS_AS(cqa::agent_agent_mode_from_string("arguing"), cqa::ParseError);
    CHECK_THROWS_AS(cqa::agent_env_mode_from_string("observing"), cqa::ParseError);
}

TEST_CASE("default config is valid and names two agents", "[dialogue]") {
    cqa::DialogueConfig cfg = cqa::default_config();
    CHECK(cqa::validate_config(cfg).empty());
    REQUIRE(cfg.agents.size() == 2);
    CHECK(cfg.agents[0].name == "Ava");
    CHECK(cfg.agents[1].name == "Ben");
    CHECK_FALSE(cfg.agents[0].expertise.has_value());
    CHECK(cfg.interaction.agent_agent_modes.size() == 4);
    CHECK(cfg.interaction.agent_env_modes.size() == 2);
    CHECK_FALSE(cfg.environment.setting.empty());
}

TEST_CASE("validate_config reports each violation code", "[dialogue]") {
    SECTION("no agents") {
        cqa::DialogueConfig cfg = cqa::default_config();
        cfg.agents.clear();
        CHECK(has_code(cqa::validate_config(cfg), "NoAgents"));
    }
    SECTION("empty name") {
        cqa::DialogueConfig cfg = cqa::default_config();
        cfg.agents[1].name = "";
        CHECK(has_code(cqa::validate_config(cfg), "EmptyAgentName"));
    }
    SECTION("duplicate name") {
        cqa::DialogueConfig cfg = cqa::default_config();
        cfg.agents[1].name = cfg.agents[0].name;
        CHECK(has_code(cqa::validate_config(cfg), "DuplicateAgent"));
    }
    SECTION("empty character") {
        cqa::DialogueConfig cfg = cqa::default_config();
        cfg.agents[0].character = "";
        CHECK(has_code(cqa::validate_config(cfg), "EmptyCharacter"));
    }
    SECTION("empty setting") {
        cqa::DialogueConfig cfg = cqa::default_config();
        cfg.environment.setting = "";
        CHECK(has_code(cqa::validate_config(cfg), "EmptySetting"));
    }
    SECTION("two agents need at least one agent-agent mode") {
        cqa::DialogueConfig cfg = cqa::default_config();
        cfg.interaction.agent_agent_modes.clear();
        CHECK(has_code(cqa::validate_config(cfg), "NoInteractionModes"));
    }
    SECTION("a single agent may have no agent-agent modes") {
        cqa::DialogueConfig cfg = cqa::default_config();
        cfg.agents.resize(1);
        cfg.interaction.agent_agent_modes.clear();
        CHECK(cqa::validate_config(cfg).empty());
    }
    SECTION("violations accumulate") {
        cqa::DialogueConfig cfg = cqa::default_config();
        cfg.agents[0].name = "";
        cfg.environment.setting = "";
        auto report = cqa::validate_config(cfg);
        CHECK(report.size() >= 2);
    }
}

TEST_CASE("render_system_prompt lays sections out in order", "[dialogue]") {
    cqa::DialogueConfig cfg = cqa::default_config();
    cfg.agents[0].expertise = "number theory";
    cfg.environment.emergent_events = {"A participant may ask for a recap of settled results."};
    std::string p = cqa::render_system_prompt(cfg);

    auto pos_setting = p.find("Setting: " + cfg.environment.setting);
    auto pos_personas = p.find("Participants:\n");
    auto pos_ava = p.find("- Ava, methodical analyst. Objective: ");
    auto pos_expertise = p.find(" Expertise: number theory.");
    auto pos_rules = p.find("Environment rules:\n");
    auto pos_events = p.find("Events that may arise during the discussion:\n");
    auto pos_control = p.find("Task control: ");
    auto pos_aa = p.find("The participants may ");
    auto pos_ae = p.find("They may also ");
    auto pos_format = p.find("Dialogue format: free-form discussion.");
    auto pos_turns = p.find("Turn policy: ");
    auto pos_convo = p.find("Conduct the entire reasoning as a conversation among Ava and Ben");
    auto pos_scene = p.find("[Scene: Question 2]");

    REQUIRE(pos_setting != std::string::npos);
    REQUIRE(pos_personas != std::string::npos);
    REQUIRE(pos_ava != std::string::npos);
    REQUIRE(pos_expertise != std::string::npos);
    REQUIRE(pos_rules != std::string::npos);
    REQUIRE(pos_events != std::string::npos);
    REQUIRE(pos_control != std::string::npos);
    REQUIRE(pos_aa != std::string::npos);
    REQUIRE(pos_ae != std::string::npos);
    REQUIRE(pos_format != std::string::npos);
    REQUIRE(pos_turns != std::string::npos);
    REQUIRE(pos_convo != std::string::npos);
    REQUIRE(pos_scene != std::string::npos);

    CHECK(pos_setting < pos_personas);
    CHECK(pos_personas < pos_ava);
    CHECK(pos_ava < pos_rules);
    CHECK(pos_rules < pos_events);
    CHECK(pos_events < pos_control);
    CHECK(pos_control < pos_aa);
    CHECK(pos_aa < pos_ae);
    CHECK(pos_ae < pos_format);
    CHECK(pos_format < pos_turns);
    CHECK(pos_turns < pos_convo);

    SECTION("all four agent-agent phrases appear with serial joining") {
        CHECK(p.find("resolve conflicting conclusions") != std::string::npos);
        CHECK(p.find("negotiate which approach to pursue") != std::string::npos);
        CHECK(p.find("supplement each other's partial work") != std::string::npos);
        CHECK(p.find(" and prompt each other with guiding questions.") != std::string::npos);
    }
    SECTION("prompt ends with the answer directive block") {
        std::string tail = cqa::answer_directive_block();
        REQUIRE(p.size() >= tail.size());
        CHECK(p.substr(p.size() - tail.size()) == tail);
        CHECK(tail.find("Answer 1: \\boxed{") != std::string::npos);
        CHECK(tail.find("Answer 2: \\boxed{") != std::string::npos);
        CHECK(tail.find("choice letter") != std::string::npos);
    }
}

TEST_CASE("render_system_prompt omits empty optional sections", "[dialogue]") {
    cqa::DialogueConfig cfg = cqa::default_config();
    cfg.environment.progression_rules.clear();
    cfg.environment.emergent_events.clear();
    cfg.environment.task_control.clear();
    cfg.interaction.agent_env_modes.clear();
    cfg.interaction.dialogue_format.clear();
    cfg.interaction.turn_policy.clear();
    std::string p = cqa::render_system_prompt(cfg);
    CHECK(p.find("Environment rules:") == std::string::npos);
    CHECK(p.find("Events that may arise") == std::string::npos);
    CHECK(p.find("Task control:") == std::string::npos);
    CHECK(p.find("They may also") == std::string::npos);
    CHECK(p.find("Dialogue format:") == std::string::npos);
    CHECK(p.find("Turn policy:") == std::string::npos);
    CHECK(p.find("The participants may ") != std::string::npos);
}

TEST_CASE("socratic format adds the question-driven instruction", "[dialogue]") {
    cqa::DialogueConfig cfg = cqa::default_config();
    std::string base = cqa::render_system_prompt(cfg);
    CHECK(base.find("Drive the exchange with questions") == std::string::npos);

    cfg.interaction.dialogue_format = "Socratic dialogue";
    std::string socratic = cqa::render_system_prompt(cfg);
    CHECK(socratic.find("Drive the exchange with questions") != std::string::npos);

    cfg.interaction.dialogue_format = "structured SOCRATIC exchange";
    CHECK(cqa::render_system_prompt(cfg).find("Drive the exchange with questions") !=
          std::string::npos);
}

TEST_CASE("render_system_prompt rejects invalid configs", "[dialogue]") {
    cqa::DialogueConfig cfg = cqa::default_config();
    cfg.agents.clear();
    CHECK_THROWS_AS(cqa::render_system_prompt(cfg), cqa::ConfigInvalid);
    try {
        cqa::render_system_prompt(cfg);
        FAIL("expected ConfigInvalid");
    } catch (const cqa::ConfigInvalid& e) {
        CHECK(std::string(e.what()).find("NoAgents") != std::string::npos);
    }
}

TEST_CASE("dialogue config json round-trip preserves every field", "[dialogue]") {
    cqa::DialogueConfig cfg = cqa::default_config();
    cfg.agents[0].expertise = "combinatorics";
    cfg.environment.emergent_events = {"A surprise constraint appears."};
    cfg.interaction.dialogue_format = "Socratic dialogue";

    cqa::json j = cqa::dialogue_config_to_json(cfg);
    cqa::DialogueConfig back = cqa::dialogue_config_from_json(j);

    REQUIRE(back.agents.size() == cfg.agents.size());
    for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
        CHECK(back.agents[i].name == cfg.agents[i].name);
        CHECK(back.agents[i].character == cfg.agents[i].character);
        CHECK(back.agents[i].objective == cfg.agents[i].objective);
        CHECK(back.agents[i].expertise == cfg.agents[i].expertise);
    }
    CHECK(back.environment.setting == cfg.environment.setting);
    CHECK(back.environment.progression_rules == cfg.environment.progression_rules);
    CHECK(back.environment.emergent_events == cfg.environment.emergent_events);
    CHECK(back.environment.task_control == cfg.environment.task_control);
    CHECK(back.interaction.agent_agent_modes == cfg.interaction.agent_agent_modes);
    CHECK(back.interaction.agent_env_modes == cfg.interaction.agent_env_modes);
    CHECK(back.interaction.dialogue_format == cfg.interaction.dialogue_format);
    CHECK(back.interaction.turn_policy == cfg.interaction.turn_policy);

    CHECK(cqa::render_system_prompt(back) == cqa::render_system_prompt(cfg));
}

TEST_CASE("dialogue config json fills missing sections from the default", "[dialogue]") {
    cqa::DialogueConfig def = cqa::default_config();

    SECTION("empty object is the default config") {
        cqa::DialogueConfig cfg = cqa::dialogue_config_from_json(cqa::json::object());
        CHECK(cqa::render_system_prompt(cfg) == cqa::render_system_prompt(def));
    }
    SECTION("agents alone replace only the agent list") {
        cqa::json j{{"agents", cqa::json::array({cqa::json{{"name", "Kai"},
                                                           {"character", "planner"},
                                                           {"objective", "lay out the steps"}}})}};
        cqa::DialogueConfig cfg = cqa::dialogue_config_from_json(j);
        REQUIRE(cfg.agents.size() == 1);
        CHECK(cfg.agents[0].name == "Kai");
        CHECK_FALSE(cfg.agents[0].expertise.has_value());
        CHECK(cfg.environment.setting == def.environment.setting);
        CHECK(cfg.interaction.agent_agent_modes == def.interaction.agent_agent_modes);
    }
    SECTION("partial environment keeps unmentioned fields") {
        cqa::json j{{"environment", {{"setting", "A lab bench."}}}};
        cqa::DialogueConfig cfg = cqa::dialogue_config_from_json(j);
        CHECK(cfg.environment.setting == "A lab bench.");
        CHECK(cfg.environment.progression_rules == def.environment.progression_rules);
        CHECK(cfg.environment.task_control == def.environment.task_control);
    }
    SECTION("interaction modes parse from strings") {
        cqa::json j{{"interaction",
                     {{"agent_agent_modes", cqa::json::array({"negotiation"})},
                      {"agent_env_modes", cqa::json::array()}}}};
        cqa::DialogueConfig cfg = cqa::dialogue_config_from_json(j);
        REQUIRE(cfg.interaction.agent_agent_modes.size() == 1);
        CHECK(*cfg.interaction.agent_agent_modes.begin() == cqa::AgentAgentMode::NEGOTIATION);
        CHECK(cfg.interaction.agent_env_modes.empty());
        CHECK(cfg.interaction.dialogue_format == def.interaction.dialogue_format);
    }
}
