#!/usr/bin/env python3
"""Generate the bundled fixture corpus under data/fixture/.

The corpus is a synthetic language: a small phrase grammar over word classes,
Zipfian type frequencies within each class, word lengths that grow with
frequency rank, and collocations that make some words predictable from the
previous word. Punctuation, digits and capitalized sentence starts are mixed
in so the three filtering protocols select different vocabularies.

Output is fully determined by --seed.
"""

import argparse
import math
import os
import random

ALPHABET = "abcdefghijklmnopqrstuvwxyzáéíóúñ"
CONSONANTS = "bcdfghjklmnprstvzñ"
VOWELS = "aeiouáéíóú"


def make_form(rng, length, taken):
    while True:
        chars = []
        for i in range(length):
            pool = VOWELS if i % 2 == (1 if rng.random() < 0.7 else 0) else CONSONANTS
            if rng.random() < 0.08:
                pool = ALPHABET
            chars.append(rng.choice(pool))
        form = "".join(chars)
        if form not in taken:
            taken.add(form)
            return form


def make_class(rng, size, base_len, slope, taken):
    words = []
    for rank in range(1, size + 1):
        mean = base_len + slope * math.log2(rank)
        length = max(1, int(round(rng.gauss(mean, 1.1))))
        words.append(make_form(rng, length, taken))
    weights = [1.0 / (r ** 1.05) for r in range(1, size + 1)]
    return words, weights


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20231017)
    ap.add_argument("--train-tokens", type=int, default=80000)
    ap.add_argument("--test-tokens", type=int, default=20000)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "fixture"))
    args = ap.parse_args()

    rng = random.Random(args.seed)
    taken = set()
    classes = {
        "det": make_class(rng, 12, 1.6, 0.5, taken),
        "prep": make_class(rng, 20, 2.0, 0.6, taken),
        "noun": make_class(rng, 1800, 3.0, 0.55, taken),
        "verb": make_class(rng, 900, 3.2, 0.55, taken),
        "adj": make_class(rng, 600, 3.5, 0.5, taken),
        "conj": make_class(rng, 6, 1.5, 0.6, taken),
    }

    # Collocations: each noun prefers a few verbs, each adjective a few nouns.
    verb_pref = {n: rng.sample(range(60), 3) for n in range(len(classes["noun"][0]))}
    noun_pref = {a: rng.sample(range(80), 3) for a in range(len(classes["adj"][0]))}

    def draw(cls, prefer=None):
        words, weights = classes[cls]
        if prefer is not None and rng.random() < 0.55:
            return rng.choice(prefer)
        return rng.choices(range(len(words)), weights=weights)[0]

    def noun_phrase(out):
        out.append(classes["det"][0][draw("det")])
        noun = None
        if rng.random() < 0.35:
            adj = draw("adj")
            out.append(classes["adj"][0][adj])
            noun = draw("noun", noun_pref[adj])
        else:
            noun = draw("noun")
        out.append(classes["noun"][0][noun])
        return noun

    def sentence():
        out = []
        subj = noun_phrase(out)
        out.append(classes["verb"][0][draw("verb", verb_pref[subj])])
        noun_phrase(out)
        if rng.random() < 0.4:
            out.append(classes["prep"][0][draw("prep")])
            noun_phrase(out)
        if rng.random() < 0.2:
            out[-1] += ","
            out.append(classes["conj"][0][draw("conj")])
            subj = noun_phrase(out)
            out.append(classes["verb"][0][draw("verb", verb_pref[subj])])
        if rng.random() < 0.05:
            out.insert(rng.randrange(1, len(out)), str(rng.randint(2, 2024)))
        if rng.random() < 0.03:
            i = rng.randrange(len(out))
            out[i] = out[i] + "-" + classes["adj"][0][draw("adj")]
        if rng.random() < 0.02:
            out.insert(0, '"' + out.pop(0))
            out[-1] += '"'
        if rng.random() < 0.3:
            out[0] = out[0][:1].upper() + out[0][1:]
        out[-1] += "?" if rng.random() < 0.05 else "."
        return " ".join(out)

    def emit(path, budget):
        count = 0
        lines = []
        while count < budget:
            s = sentence()
            count += len(s.split())
            lines.append(s)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
        return count

    os.makedirs(args.out, exist_ok=True)
    n_train = emit(os.path.join(args.out, "train.txt"), args.train_tokens)
    n_test = emit(os.path.join(args.out, "test.txt"), args.test_tokens)
    with open(os.path.join(args.out, "alphabet.txt"), "w", encoding="utf-8", newline="\n") as f:
        f.write("# alphabet of the fixture language\n" + ALPHABET + "\n")
    print(f"train: {n_train} tokens, test: {n_test} tokens")


if __name__ == "__main__":
    main()
