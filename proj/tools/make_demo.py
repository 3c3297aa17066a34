#!/usr/bin/env python3
# Copyright 2026 The premise-forge Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the deterministic demo corpus under data/demo.

Produces tiny images, a manifest, scripted mock fixtures for every pipeline
stage, a candidate model's scripted replies, judge replies, reward
completions and a GRPO groups file. Run the CLI afterwards to regenerate
dataset.jsonl and predictions.jsonl (see README).
"""
import hashlib
import json
import math
import pathlib
import sys

from PIL import Image

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data" / "demo"

SUBTYPES = [
    "entity_existence", "visual_attributes", "numerical_attributes", "state_attributes",
    "textual_content", "symbolic_meaning", "spatial_relations", "interaction_relations",
    "part_whole_relations", "emotional_state", "scene", "logical_relations",
    "commonsense_knowledge",
]

# premise, corrupted premise, caption, follow-up question, direct answer
CONTENT = [
    ("There is a bicycle next to the bench.", "There is a unicycle next to the bench.",
     "A red bicycle leans next to a wooden bench in a quiet park.", "what is the bench made of", "wood"),
    ("The umbrella is yellow.", "The umbrella is purple.",
     "A woman holds a yellow umbrella while crossing a rainy street.", "what is the woman crossing",
     "a rainy street"),
    ("There are three apples on the plate.", "There are seven apples on the plate.",
     "Three apples rest on a white plate beside a glass of milk.", "what is next to the plate",
     "a glass of milk"),
    ("The window is open.", "The window is shut and boarded up.",
     "An open window lets sunlight into a small kitchen.", "which room does the window belong to",
     "the kitchen"),
    ("The sign reads OPEN.", "The sign reads CLOSED.",
     "A shop door displays a sign that reads OPEN in green letters.", "what color are the letters",
     "green"),
    ("The hexagonal sign means stop.", "The hexagonal sign means yield.",
     "A hexagonal red sign at the corner means stop for approaching cars.", "what color is the sign", "red"),
    ("The cat is sitting on the car.", "The cat is hiding under the car.",
     "A grey cat is sitting on the roof of a parked car.", "what color is the cat", "grey"),
    ("The boy is throwing a ball to the dog.", "The boy is taking a ball from the dog.",
     "A boy is throwing a ball to a brown dog on the lawn.", "what color is the dog", "brown"),
    ("The wheel belongs to the truck.", "The wheel belongs to the bicycle.",
     "A large wheel belongs to the blue truck parked outside the garage.", "where is the truck parked",
     "outside the garage"),
    ("The girl looks happy.", "The girl looks furious.",
     "A girl looks happy as she holds a bunch of balloons.", "what is she holding", "balloons"),
    ("The photo shows a beach at sunset.", "The photo shows a ski slope at noon.",
     "The photo shows a quiet beach at sunset with gentle waves.", "what are the waves like", "gentle"),
    ("The street is wet because it rained.", "The street is wet because a pipe burst.",
     "The street is wet because it rained, and people carry umbrellas.", "what are the people carrying",
     "umbrellas"),
    ("The cake is for a birthday party.", "The cake is for a wedding reception.",
     "A cake with candles is ready for a birthday party at the table.", "what is on the cake", "candles"),
]

IMAGES = [f"img{k + 1}" for k in range(5)]
COLORS = [(200, 40, 40), (40, 160, 60), (40, 60, 200), (220, 200, 40), (120, 120, 120)]


def owner(subtype_index):
    """Image index whose extraction finds this subtype."""
    return subtype_index % len(IMAGES)


def clause(sentence):
    s = sentence.rstrip(".")
    return s[0].lower() + s[1:]


def question(premise, ask):
    return f"Given that {clause(premise)}, {ask}?"


def sample_id(image_id, subtype, label, q):
    payload = "\x1f".join([image_id, subtype, label, q]).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def write_json(path, value):
    path.write_text(json.dumps(value, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def main():
    (ROOT / "images").mkdir(parents=True, exist_ok=True)
    for image_id, color in zip(IMAGES, COLORS):
        Image.new("RGB", (8, 8), color).save(ROOT / "images" / f"{image_id}.png", optimize=False)
    manifest = "# image_id<TAB>path\n" + "".join(f"{i}\timages/{i}.png\n" for i in IMAGES)
    (ROOT / "manifest.tsv").write_text(manifest, encoding="utf-8")

    fixtures = {"extract:*": "NO"}
    samples = []
    for s, name in enumerate(SUBTYPES):
        premise, corrupted, caption, ask, answer = CONTENT[s]
        image_id = IMAGES[owner(s)]
        key = f"{image_id}:{name}"
        q_pos = question(premise, ask)
        q_neg = question(corrupted, ask)
        fixtures[f"extract:{key}"] = premise
        fixtures[f"caption:{key}"] = caption
        fixtures[f"corrupt:{key}"] = corrupted
        fixtures[f"question_pos:{key}"] = q_pos
        fixtures[f"question_neg:{key}"] = q_neg
        fixtures[f"answer_pos:{key}"] = (
            f"<think>The caption confirms that {clause(premise)}.</think>"
            f"<answer>VALID: {answer}.</answer>")
        fixtures[f"answer_neg:{key}"] = (
            f"<think>The caption shows that {clause(premise)}, so the claim that "
            f"{clause(corrupted)} is wrong.</think>"
            f"<answer>FALSE_PREMISE: it is not true that {clause(corrupted)}; {clause(premise)}.</answer>")
        samples.append((s, name, image_id, "true_premise", q_pos, premise, corrupted, answer))
        samples.append((s, name, image_id, "false_premise", q_neg, premise, corrupted, answer))
    write_json(ROOT / "fixtures.json", fixtures)

    # A candidate whose behaviour varies by subtype, so every level gets a
    # different mix of right, wrong, fallback-parsed and unparseable replies.
    candidate = {"eval:*": "Hmm."}
    for s, name, image_id, label, q, premise, corrupted, answer in samples:
        sid = sample_id(image_id, name, label, q)
        fp = label == "false_premise"
        structured_fp = (f"<think>The image does not support that {clause(corrupted)}.</think>"
                         f"<answer>FALSE_PREMISE: {clause(premise)}.</answer>")
        structured_tp = f"<think>Looking at the image.</think><answer>VALID: {answer}.</answer>"
        mode = s % 4
        if mode == 0:
            reply = structured_fp if fp else structured_tp
        elif mode == 1:
            reply = structured_fp if fp else (
                "<think>Unsure.</think><answer>FALSE_PREMISE: I cannot see that.</answer>")
        elif mode == 2:
            reply = f"The answer is {answer}, clearly visible." if fp else structured_tp
        elif fp:
            reply = "I think this question rests on a false premise about the image."
        elif s == 11:
            reply = {"error": "timeout", "message": "scripted timeout"}
        else:
            reply = "Hmm."
        candidate[f"eval:{sid}"] = reply
    write_json(ROOT / "candidate_fixtures.json", candidate)

    completions, judge = [], {"judge:*": "Score:\n3"}
    for s, name, image_id, label, q, premise, corrupted, answer in samples[:6]:
        sid = sample_id(image_id, name, label, q)
        fp = label == "false_premise"
        good = (f"<think>The image shows that {clause(premise)}.</think>"
                + (f"<answer>FALSE_PREMISE: {clause(premise)}.</answer>" if fp
                   else f"<answer>VALID: {answer}.</answer>"))
        bad = f"<answer>VALID: {answer}.</answer>"
        completions.append({"sample_id": sid, "completion": good})
        completions.append({"sample_id": sid, "completion": bad})
        judge[f"judge:{sid}:0"] = "Coherent and supports the verdict.\n5"
    (ROOT / "completions.jsonl").write_text(
        "".join(json.dumps(c, ensure_ascii=False) + "\n" for c in completions), encoding="utf-8")
    write_json(ROOT / "judge_fixtures.json", judge)

    write_json(ROOT / "config.json", {
        "backends": {
            "extractor": {"kind": "mock", "fixtures": "fixtures.json", "model": "mock-vision"},
            "question": {"kind": "mock", "fixtures": "fixtures.json", "model": "mock-text"},
            "answer": {"kind": "mock", "fixtures": "fixtures.json", "model": "mock-text"},
        },
        "image_manifest": "manifest.tsv",
        "concurrency": 4,
        "quotas": {name: 1 for name in SUBTYPES},
        "bootstrap": {"resamples": 1000, "seed": 0},
        "split": {"fractions": [0.5, 0.25, 0.25], "seed": 7},
    })
    write_json(ROOT / "candidate.json", {"kind": "mock", "fixtures": "candidate_fixtures.json",
                                         "model": "demo-candidate"})
    write_json(ROOT / "judge.json", {"kind": "mock", "fixtures": "judge_fixtures.json",
                                     "model": "demo-judge"})

    ln2 = math.log(2.0)
    write_json(ROOT / "groups.json", {"groups": [
        {"name": "worked_example", "rewards": [0.0, 1.0], "logp_current": [ln2, -ln2],
         "logp_old": [0.0, 0.0],
         "distributions": [{"current": [0.5, 0.5], "reference": [0.25, 0.75]},
                           {"current": [0.5, 0.5], "reference": [0.25, 0.75]}]},
        {"name": "on_policy", "rewards": [0.2, 0.9, 0.4, 0.5], "logp_current": [-1.0, -2.0, -0.5, -3.0],
         "logp_old": [-1.0, -2.0, -0.5, -3.0], "logp_ref": [-1.0, -2.0, -0.5, -3.0]},
        {"name": "k3_estimate", "rewards": [1.0, 0.0, 0.5], "logp_current": [-1.2, -0.7, -2.0],
         "logp_old": [-1.0, -0.9, -2.1], "logp_ref": [-0.8, -1.0, -1.5]},
    ]})
    return 0


if __name__ == "__main__":
    sys.exit(main())
