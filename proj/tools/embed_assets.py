#!/usr/bin/env python3
"""Regenerates include/scaffold/assets.hpp from the files in data/."""
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
ASSETS = [
    ("kExemplarBank", "exemplars.jsonl"),
    ("kScenarioTemplates", "scenario_templates.json"),
    ("kJudgePromptV1", "judge_prompt_v1.txt"),
]

out = [
    "#pragma once",
    "",
    "// Generated by tools/embed_assets.py from data/. Do not edit by hand.",
    "",
    "#include <string_view>",
    "",
    "namespace scaffold::assets {",
    "",
]
for name, file in ASSETS:
    text = (ROOT / "data" / file).read_text(encoding="utf-8")
    assert ')ASSET"' not in text
    out.append(f'inline constexpr std::string_view {name} = R"ASSET({text})ASSET";')
    out.append("")
out.append("}  // namespace scaffold::assets")
(ROOT / "include" / "scaffold" / "assets.hpp").write_text("\n".join(out) + "\n", encoding="utf-8")
