#!/usr/bin/env python3
"""Writes the prompt golden files from the documented default layout.

Independent of the C++ renderer: the tests compare the two byte for byte.
"""
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

ZS = {
    1: "Please determine if the hypothesis is True or False based on the given premise.",
    2: "Please determine if the following hypothesis is True or False based on the given premise.",
    3: "Please determine if the following hypothesis is True or False based on the Japanese civil code statutes.",
}
APPROACHES = [
    ("TRRAC", "Thesis, rule, rule, application, conclusion"),
    ("CLEO", "Claim, law, evaluation, outcome"),
    ("ILAC", "Issue, law, application, conclusion"),
    ("IRAACP", "Issue, rule, apply, apply, conclusion, policy"),
    ("IRREAC", "Issue, rule, rule, application, conclusion"),
    ("IGPAC", "Issue, general rule, precedent, application, conclusion"),
    ("IPAAC", "Issue, principle, authority, application, conclusion"),
    ("IRRAC", "Issue, rule, reasoning, application, conclusion"),
    ("IRAC", "Issue, rule, application, conclusion"),
]
LR = ("Please analyze if the hypothesis is True or False according to the "
      "given legal reasoning approach")
COT = "Let's think step by step"
ANSWER = "Therefore, the hypothesis (True or False) is"
REASONING = ("The premise allows rescission only at the request of the listed "
             "persons, so a rescission without any request is not provided for.")
TRUTH = {"Y": "True", "N": "False"}


def case():
    for c in json.load(open(os.path.join(DATA, "sample_completions.json"))):
        if c["id"] == "R02-1-U":
            return c
    raise SystemExit("R02-1-U missing")


def case_parts(c, labels=True):
    if labels:
        return ["Premise: " + c["premise"], "Hypothesis: " + c["hypothesis"]]
    return [c["premise"], c["hypothesis"]]


def zero_shot(c, pid, labels=True):
    return "\n".join([ZS[pid]] + case_parts(c, labels) + ["True or False?"])


def few_shot(c, bank, k):
    parts = []
    for ex in bank[:k]:
        parts += ["Question: " + ex["question"], "Answer: " + TRUTH[ex["answer"]]]
    return "\n".join(parts + [zero_shot(c, 2)])


def main():
    c = case()
    bank = json.load(open(os.path.join(DATA, "exemplars8.json")))
    files = {}
    for pid in (1, 2, 3):
        files["zs_p%d.txt" % pid] = zero_shot(c, pid)
    files["zs_p2_nolabels.txt"] = zero_shot(c, 2, labels=False)
    for k in (0, 1, 3, 8):
        files["fs_%d.txt" % k] = few_shot(c, bank, k)
    stage1 = "\n".join([ZS[2]] + case_parts(c) + [COT])
    files["cot_stage1.txt"] = stage1
    files["cot_stage2.txt"] = "\n".join([stage1, REASONING, ANSWER])
    for acr, exp in APPROACHES:
        files["lr_%s.txt" % acr] = "\n".join(
            [LR, "Approach: %s (%s)" % (acr, exp)] + case_parts(c) + ["True or False?"])
    for name, text in files.items():
        with open(os.path.join(HERE, name), "w", encoding="utf-8", newline="") as f:
            f.write(text)
    with open(os.path.join(HERE, "cot_reasoning.txt"), "w", newline="") as f:
        f.write(REASONING)
    print("wrote %d goldens" % len(files))


if __name__ == "__main__":
    main()
