// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Dialogue-reasoning system prompts, rendered from a structured configuration
// spanning three dimensions: agents (who reasons), environment (where, with
// what scaffolding), and interactions (how turns relate). Configs are data so
// sweeps over dialogue settings need no rebuild.
//
// The rendered prompt always ends with the answer directive block, keeping
// the verifier contract identical for monologue and dialogue runs.

#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/jsonl.hpp"

namespace cqa {

enum class AgentAgentMode { CONFLICT_RESOLUTION, NEGOTIATION, SUPPLEMENTATION, PROMPTING };
enum class AgentEnvMode { EXPRESS_REQUIREMENTS, RECEIVE_FEEDBACK };

inline std::string to_string(AgentAgentMode m) {
    switch (m) {
        case AgentAgentMode::CONFLICT_RESOLUTION: return "conflict_resolution";
        case AgentAgentMode::NEGOTIATION: return "negotiation";
        case AgentAgentMode::SUPPLEMENTATION: return "supplementation";
        case AgentAgentMode::PROMPTING: return "prompting";
    }
    return "conflict_resolution";
}

inline std::string to_string(AgentEnvMode m) {
    switch (m) {
        case AgentEnvMode::EXPRESS_REQUIREMENTS: return "express_requirements";
        case AgentEnvMode::RECEIVE_FEEDBACK: return "receive_feedback";
    }
    return "express_requirements";
}

inline AgentAgentMode agent_agent_mode_from_string(const std::string& s) {
    if (s == "conflict_resolution") return AgentAgentMode::CONFLICT_RESOLUTION;
    if (s == "negotiation") return AgentAgentMode::NEGOTIATION;
    if (s == "supplementation") return AgentAgentMode::SUPPLEMENTATION;
    if (s == "prompting") return AgentAgentMode::PROMPTING;
    throw ParseError("", 0, "unknown agent-agent mode: " + s);
}

inline AgentEnvMode agent_env_mode_from_string(const std::string& s) {
    if (s == "express_requirements") return AgentEnvMode::EXPRESS_REQUIREMENTS;
    if (s == "receive_feedback") return AgentEnvMode::RECEIVE_FEEDBACK;
    throw ParseError("", 0, "unknown agent-environment mode: " + s);
}

struct AgentSpec {
    std::string name;
    std::string character;  // e.g. teacher, skeptic
    std::string objective;
    std::optional<std::string> expertise;
};

struct EnvironmentSpec {
    std::string setting;
    std::vector<std::string> progression_rules;
    std::vector<std::string> emergent_events;
    std::string task_control;
};

struct InteractionSpec {
    std::set<AgentAgentMode> agent_agent_modes;
    std::set<AgentEnvMode> agent_env_modes;
    std::string dialogue_format;  // e.g. "Socratic dialogue"
    std::string turn_policy;
};

struct DialogueConfig {
    std::vector<AgentSpec> agents;
    EnvironmentSpec environment;
    InteractionSpec interaction;
};

/// Two generic reasoning agents in a neutral collaborative setting with every
/// agent-agent mode enabled and free turn-taking.
inline DialogueConfig default_config() {
    DialogueConfig cfg;
    cfg.agents.push_back({"Ava", "methodical analyst",
                          "work each question step by step and verify intermediate results",
                          std::nullopt});
    cfg.agents.push_back({"Ben", "skeptical reviewer",
                          "challenge weak steps and propose alternatives until the group converges",
                          std::nullopt});
    cfg.environment.setting =
        "A quiet study room where the participants solve the given questions together.";
    cfg.environment.progression_rules = {
        "Track which question is active and state it when the scene changes.",
        "Record each agreed intermediate result before moving on."};
    cfg.environment.task_control =
        "The participants decide when a question is settled and move to the next one.";
    cfg.interaction.agent_agent_modes = {AgentAgentMode::CONFLICT_RESOLUTION,
                                         AgentAgentMode::NEGOTIATION,
                                         AgentAgentMode::SUPPLEMENTATION, AgentAgentMode::PROMPTING};
    cfg.interaction.agent_env_modes = {AgentEnvMode::EXPRESS_REQUIREMENTS,
                                       AgentEnvMode::RECEIVE_FEEDBACK};
    cfg.interaction.dialogue_format = "free-form discussion";
    cfg.interaction.turn_policy = "free turn-taking; any participant may speak next";
    return cfg;
}

/// Empty iff every type invariant holds. Codes: NoAgents, EmptyAgentName,
/// DuplicateAgent, EmptyCharacter, EmptySetting, NoInteractionModes.
inline ValidationReport validate_config(const DialogueConfig& cfg) {
    ValidationReport report;
    if (cfg.agents.empty()) report.push_back({"NoAgents", "agents", "at least one agent required"});
    std::set<std::string> names;
    for (const auto& agent : cfg.agents) {
        if (agent.name.empty()) {
            report.push_back({"EmptyAgentName", agent.name, "agent name must be non-empty"});
        } else if (!names.insert(agent.name).second) {
            report.push_back({"DuplicateAgent", agent.name, "agent names must be unique"});
        }
        if (agent.character.empty()) {
            report.push_back({"EmptyCharacter", agent.name, "agent character must be non-empty"});
        }
    }
    if (cfg.environment.setting.empty()) {
        report.push_back({"EmptySetting", "environment", "setting must be non-empty"});
    }
    if (cfg.agents.size() >= 2 && cfg.interaction.agent_agent_modes.empty()) {
        report.push_back({"NoInteractionModes", "interaction",
                          "at least one agent-agent mode required with 2+ agents"});
    }
    return report;
}

namespace detail {

inline std::string mode_phrase(AgentAgentMode m) {
    switch (m) {
        case AgentAgentMode::CONFLICT_RESOLUTION: return "resolve conflicting conclusions";
        case AgentAgentMode::NEGOTIATION: return "negotiate which approach to pursue";
        case AgentAgentMode::SUPPLEMENTATION: return "supplement each other's partial work";
        case AgentAgentMode::PROMPTING: return "prompt each other with guiding questions";
    }
    return "";
}

inline std::string mode_phrase(AgentEnvMode m) {
    switch (m) {
        case AgentEnvMode::EXPRESS_REQUIREMENTS: return "state requirements to the environment";
        case AgentEnvMode::RECEIVE_FEEDBACK: return "receive feedback from the environment";
    }
    return "";
}

inline std::string join_names(const std::vector<AgentSpec>& agents) {
    std::string out;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (i > 0) out += (i + 1 == agents.size()) ? " and " : ", ";
        out += agents[i].name;
    }
    return out;
}

inline bool socratic_format(const std::string& format) {
    std::string lower = format;
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return lower.find("socratic") != std::string::npos;
}

}  // namespace detail

/// The trailing directive block every dialogue prompt ends with; the verifier
/// keys extraction on the exact "Answer j:" lines it asks for.
inline std::string answer_directive_block() {
    return
        "After the final scene, end your reply with one answer line per question, in order:\n"
        "Answer 1: \\boxed{<final answer to question 1>}\n"
        "Answer 2: \\boxed{<final answer to question 2>}\n"
        "Continue through the last question, one line each; for a multiple-choice question "
        "write the choice letter instead of a boxed expression.";
}

/// Deterministic template instantiation: scene description, one persona block
/// per agent, interaction rules, the conversation instruction with a new
/// scene per sub-question, and the answer directive tail.
inline std::string render_system_prompt(const DialogueConfig& cfg) {
    ValidationReport report = validate_config(cfg);
    if (!report.empty()) throw ConfigInvalid(report);

    std::string p;
    p += "You are orchestrating a collaborative reasoning dialogue.\n\n";
    p += "Setting: " + cfg.environment.setting + "\n\n";

    p += "Participants:\n";
    for (const auto& agent : cfg.agents) {
        p += "- " + agent.name + ", " + agent.character + ". Objective: " + agent.objective + ".";
        if (agent.expertise) p += " Expertise: " + *agent.expertise + ".";
        p += "\n";
    }
    p += "\n";

    if (!cfg.environment.progression_rules.empty()) {
        p += "Environment rules:\n";
        for (const auto& rule : cfg.environment.progression_rules) p += "- " + rule + "\n";
        p += "\n";
    }
    if (!cfg.environment.emergent_events.empty()) {
        p += "Events that may arise during the discussion:\n";
        for (const auto& ev : cfg.environment.emergent_events) p += "- " + ev + "\n";
        p += "\n";
    }
    if (!cfg.environment.task_control.empty()) {
        p += "Task control: " + cfg.environment.task_control + "\n\n";
    }

    if (!cfg.interaction.agent_agent_modes.empty()) {
        p += "The participants may ";
        std::size_t i = 0;
        for (auto m : cfg.interaction.agent_agent_modes) {
            if (i > 0) p += (i + 1 == cfg.interaction.agent_agent_modes.size()) ? " and " : ", ";
            p += detail::mode_phrase(m);
            ++i;
        }
        p += ".\n";
    }
    if (!cfg.interaction.agent_env_modes.empty()) {
        p += "They may also ";
        std::size_t i = 0;
        for (auto m : cfg.interaction.agent_env_modes) {
            if (i > 0) p += (i + 1 == cfg.interaction.agent_env_modes.size()) ? " and " : ", ";
            p += detail::mode_phrase(m);
            ++i;
        }
        p += ".\n";
    }
    if (!cfg.interaction.dialogue_format.empty()) {
        p += "Dialogue format: " + cfg.interaction.dialogue_format + ".\n";
    }
    if (!cfg.interaction.turn_policy.empty()) {
        p += "Turn policy: " + cfg.interaction.turn_policy + ".\n";
    }
    if (detail::socratic_format(cfg.interaction.dialogue_format)) {
        p += "Drive the exchange with questions: each turn should pose or answer a question "
             "directed at another participant.\n";
    }
    p += "\n";

    p += "Conduct the entire reasoning as a conversation among " + detail::join_names(cfg.agents) +
         ", with each turn written as \"Name: ...\". Open a new scene for every question, "
         "introduced by a bracketed header line such as [Scene: Question 2], and settle that "
         "question inside its scene before moving on.\n\n";
    p += answer_directive_block();
    return p;
}

// --- config (de)serialization --------------------------------------------------

inline json agent_to_json(const AgentSpec& a) {
    json j{{"name", a.name}, {"character", a.character}, {"objective", a.objective}};
    if (a.expertise) j["expertise"] = *a.expertise;
    return j;
}

inline json dialogue_config_to_json(const DialogueConfig& cfg) {
    json agents = json::array();
    for (const auto& a : cfg.agents) agents.push_back(agent_to_json(a));
    json aa = json::array();
    for (auto m : cfg.interaction.agent_agent_modes) aa.push_back(to_string(m));
    json ae = json::array();
    for (auto m : cfg.interaction.agent_env_modes) ae.push_back(to_string(m));
    return json{{"agents", agents},
                {"environment",
                 {{"setting", cfg.environment.setting},
                  {"progression_rules", cfg.environment.progression_rules},
                  {"emergent_events", cfg.environment.emergent_events},
                  {"task_control", cfg.environment.task_control}}},
                {"interaction",
                 {{"agent_agent_modes", aa},
                  {"agent_env_modes", ae},
                  {"dialogue_format", cfg.interaction.dialogue_format},
                  {"turn_policy", cfg.interaction.turn_policy}}}};
}

/// Parses a dialogue section. Missing agents/environment/interaction fall
/// back to the corresponding piece of default_config().
inline DialogueConfig dialogue_config_from_json(const json& j) {
    DialogueConfig cfg = default_config();
    if (j.contains("agents")) {
        cfg.agents.clear();
        for (const auto& a : j.at("agents")) {
            AgentSpec spec;
            spec.name = a.value("name", "");
            spec.character = a.value("character", "");
            spec.objective = a.value("objective", "");
            if (a.contains("expertise")) spec.expertise = a["expertise"].get<std::string>();
            cfg.agents.push_back(spec);
        }
    }
    if (j.contains("environment")) {
        const auto& e = j["environment"];
        cfg.environment.setting = e.value("setting", cfg.environment.setting);
        if (e.contains("progression_rules")) {
            cfg.environment.progression_rules =
                e["progression_rules"].get<std::vector<std::string>>();
        }
        if (e.contains("emergent_events")) {
            cfg.environment.emergent_events = e["emergent_events"].get<std::vector<std::string>>();
        }
        cfg.environment.task_control = e.value("task_control", cfg.environment.task_control);
    }
    if (j.contains("interaction")) {
        const auto& it = j["interaction"];
        if (it.contains("agent_agent_modes")) {
            cfg.interaction.agent_agent_modes.clear();
            for (const auto& m : it["agent_agent_modes"]) {
                cfg.interaction.agent_agent_modes.insert(
                    agent_agent_mode_from_string(m.get<std::string>()));
            }
        }
        if (it.contains("agent_env_modes")) {
            cfg.interaction.agent_env_modes.clear();
            for (const auto& m : it["agent_env_modes"]) {
                cfg.interaction.agent_env_modes.insert(
                    agent_env_mode_from_string(m.get<std::string>()));
            }
        }
        cfg.interaction.dialogue_format = it.value("dialogue_format", cfg.interaction.dialogue_format);
        cfg.interaction.turn_policy = it.value("turn_policy", cfg.interaction.turn_policy);
    }
    return cfg;
}

}  // namespace cqa
