#!/usr/bin/env python3
"""Generate the bundled synthetic chunking corpora.

Writes three-column `word POS chunk` files (one token per line, blank line
between sentences) from a hand-written grammar. The text is nonsense prose
over a business-news vocabulary, but the annotation is structurally
faithful: base NPs with determiners, adjectives, compounds and internal
coordination, possessive splits, relative pronouns and ditransitives (all
three produce adjacent NPs), verb groups with modals, particles and
passives, PPs, ADVPs, ADJPs, SBARs, money NPs, appositives, quotations
and parentheticals.

Regenerate with:  python3 tools/gen_corpus.py
The committed data files are the output of the default arguments.
"""

import argparse
import random

DT = "the a an this that these those some no each every another any".split()
PDT = "all both half".split()
PRPS = "his her its their our my your".split()
JJ = ("new big small old young good bad early late strong weak high low long "
      "short major minor public private foreign local recent current former "
      "chief net annual federal financial industrial corporate heavy special "
      "general likely possible difficult").split()
JJR = "higher lower bigger smaller stronger earlier better larger".split()
JJS = "biggest largest smallest best latest".split()
NN = ("company market year price share stock group bank plan rate sale profit "
      "loss deal unit firm chairman president analyst report quarter month "
      "week day issue bond fund index trade product system program offer bid "
      "cost tax law rule court case time way part idea problem result growth "
      "increase decline statement agreement contract maker investor official "
      "economy industry government spokesman buyer seller board committee "
      "venture stake concern").split()
NNS = ("companies markets years prices shares stocks groups banks plans rates "
       "sales profits losses deals units firms analysts reports quarters "
       "months weeks days issues bonds funds traders products systems "
       "programs offers bids costs taxes laws rules investors officials "
       "results gains executives buyers sellers concerns").split()
NNP = ("Smith Johnson Ford Boston Chicago Texas Japan Europe Congress "
       "Treasury London Brown Davis Miller Wilson Moore Taylor Anderson "
       "Thomas Jackson White Harris Martin Clark Lewis Walker Hall Allen "
       "Monday Tuesday Wednesday Thursday Friday September October November").split()
NNPS = "Securities Industries Airlines Motors Partners Systems".split()
PRP = "he she it they we I you".split()
VB = ("buy sell make take give get keep hold raise cut pay offer move help "
      "report expect continue remain become include reduce boost complete "
      "acquire").split()
VBD = ("bought sold made took gave got kept held raised cut paid offered "
       "moved said reported expected continued rose fell declined increased "
       "dropped gained announced agreed closed ended added noted acquired "
       "posted set turned").split()
VBZ = ("buys sells makes takes gives says reports expects continues remains "
       "includes rises falls holds pays offers owns plans").split()
VBP = ("buy sell make say report expect continue remain include rise fall "
       "own plan").split()
VBG = ("buying selling making taking rising falling growing declining moving "
       "holding operating trading pending remaining").split()
VBN = ("bought sold made taken given held raised expected reported offered "
       "based related increased proposed completed acquired set posted").split()
MD = "will would can could may might must should".split()
RB = ("also still already recently sharply slightly strongly quickly slowly "
      "often nearly only now then however instead again soon previously "
      "largely closely").split()
QUANT_RB = "about nearly only almost roughly".split()
REFL = "itself themselves".split()
MONTH = "September October November".split()
RBR = "more earlier later faster".split()
RBS = "most least".split()
RP = "up down off out back over".split()
IN = ("of in on for with at by from as into over under about after before "
      "during through against between since without despite amid").split()
SUB = "if because although while since unless".split()
CC = "and or but".split()
WDT = "which that".split()
WP = "who what".split()
WPS = ["whose"]
WRB = "when where while why".split()
CD = ("one two three 10 25 50 100 200 500 1987 1988 1989 3.5 1.2 7.6 15 30 "
      "40 75 250 million billion 5.8 2.4 60").split()

DITRANSITIVE_VBD = "gave offered paid sold".split()
TIME_JJ = "last next early late".split()
TIME_NN = "week month year quarter".split()


def choice(rng, xs):
    return xs[rng.randrange(len(xs))]


def retag(toks, first_chunk):
    out = []
    for i, (w, p, _) in enumerate(toks):
        out.append((w, p, first_chunk if i == 0 else "I-NP"))
    return out


def money_np(rng):
    toks = [("$", "$", "B-NP"), (choice(rng, CD), "CD", "I-NP")]
    if rng.random() < 0.5:
        toks.append((choice(rng, ["million", "billion"]), "CD", "I-NP"))
    return toks


def np_core(rng, first_chunk="B-NP"):
    """A plain base NP without any adjacency continuation."""
    r = rng.random()
    if r < 0.08:
        return [(choice(rng, PRP), "PRP", first_chunk)]
    if r < 0.14:
        return retag(money_np(rng), first_chunk)
    if r < 0.22:
        if rng.random() < 0.15:
            toks = [(choice(rng, MONTH), "NNP", None),
                    (choice(rng, ["1987", "1988", "1989"]), "CD", None)]
            return retag(toks, first_chunk)
        toks = [(choice(rng, NNP), "NNP", None)]
        if rng.random() < 0.3:
            toks.append((choice(rng, NNP), "NNP", None))
        if rng.random() < 0.15:
            toks.append((choice(rng, NNPS), "NNPS", None))
        return retag(toks, first_chunk)
    toks = []
    if rng.random() < 0.04:
        toks.append(("such", "JJ", None))
        toks.append(("a" if rng.random() < 0.7 else "an", "DT", None))
    elif rng.random() < 0.10:
        toks.append((choice(rng, PDT), "PDT", None))
        toks.append((choice(rng, DT), "DT", None))
    elif rng.random() < 0.72:
        if rng.random() < 0.8:
            toks.append((choice(rng, DT), "DT", None))
        else:
            toks.append((choice(rng, PRPS), "PRP$", None))
    if rng.random() < 0.09:
        toks.append((choice(rng, RBS), "RBS", None))
        toks.append((choice(rng, JJ), "JJ", None))
    if rng.random() < 0.12:
        if rng.random() < 0.3:
            toks.append((choice(rng, QUANT_RB), "RB", None))
        toks.append((choice(rng, CD), "CD", None))
    for k in range(2):
        if rng.random() < 0.34:
            if k == 0 and rng.random() < 0.16:
                toks.append((choice(rng, RB), "RB", None))
            r2 = rng.random()
            if r2 < 0.62:
                toks.append((choice(rng, JJ), "JJ", None))
                if rng.random() < 0.11:
                    toks.append((",", ",", None))
                    toks.append((choice(rng, JJ), "JJ", None))
            elif r2 < 0.76:
                toks.append((choice(rng, JJR), "JJR", None))
            elif r2 < 0.84:
                toks.append((choice(rng, JJS), "JJS", None))
            elif r2 < 0.93:
                toks.append((choice(rng, VBG), "VBG", None))
            else:
                toks.append((choice(rng, VBN), "VBN", None))
    if rng.random() < 0.33:
        head = [(choice(rng, NNS), "NNS", None)]
    else:
        head = []
        if rng.random() < 0.16:
            head.append((choice(rng, NN), "NN", None))
        head.append((choice(rng, NN), "NN", None))
    toks.extend(head)
    if rng.random() < 0.04:
        # Title plus name, e.g. "the chairman Smith".
        toks.append((choice(rng, NNP), "NNP", None))
    elif rng.random() < 0.03:
        toks.append((choice(rng, REFL), "PRP", None))
    if rng.random() < 0.07:
        # Numbered noun, e.g. "page 50".
        toks.append((choice(rng, CD), "CD", None))
    if rng.random() < 0.12:
        # Coordinated head inside a single NP.
        toks.append((choice(rng, CC), "CC", None))
        if rng.random() < 0.35:
            toks.append((choice(rng, JJ), "JJ", None))
        tag = "NNS" if rng.random() < 0.5 else "NN"
        toks.append((choice(rng, NNS if tag == "NNS" else NN), tag, None))
    return retag(toks, first_chunk)


def gen_np(rng, allow_split=True):
    toks = np_core(rng)
    if allow_split and toks[-1][1] in ("NN", "NNS", "NNP", "NNPS") and rng.random() < 0.13:
        # Possessive: a second NP starts at 's, adjacent to the first.
        toks.append(("'s", "POS", "B-NP"))
        tail = np_core(rng, first_chunk="I-NP")
        trimmed = [t for t in tail if t[1] not in ("DT", "PRP$", "PRP", "PDT", "$")]
        if not trimmed:
            trimmed = [(choice(rng, NN), "NN", "I-NP")]
        toks.extend((w, p, "I-NP") for w, p, _ in trimmed)
    if rng.random() < 0.08:
        # Parenthetical aside right after the NP.
        toks.append(("(", "(", "O"))
        toks.extend(np_core(rng))
        toks.append((")", ")", "O"))
    elif rng.random() < 0.07:
        # Scare quotes around the whole NP.
        toks = [("``", "``", "O")] + toks + [("''", "''", "O")]
    return toks


def gen_pp(rng):
    if rng.random() < 0.12:
        head = ("to", "TO", "B-PP")
    else:
        head = (choice(rng, IN), "IN", "B-PP")
    return [head] + gen_np(rng)


def gen_advp(rng):
    r = rng.random()
    if r < 0.15:
        return [(choice(rng, RBR), "RBR", "B-ADVP")]
    return [(choice(rng, RB), "RB", "B-ADVP")]


def gen_vp(rng):
    toks = []
    ditransitive = False
    r = rng.random()
    if r < 0.18:
        toks.append((choice(rng, MD), "MD", "B-VP"))
        if rng.random() < 0.25:
            toks.append((choice(rng, RB), "RB", "I-VP"))
        toks.append((choice(rng, VB), "VB", "I-VP"))
    elif r < 0.32:
        # Passive or perfect group.
        if rng.random() < 0.55:
            toks.append(("was" if rng.random() < 0.6 else "were",
                         "VBD", "B-VP"))
        else:
            toks.append(("has" if rng.random() < 0.6 else "have",
                         "VBZ", "B-VP"))
            w = toks[-1][0]
            toks[-1] = (w, "VBZ" if w == "has" else "VBP", "B-VP")
        if rng.random() < 0.2:
            toks.append((choice(rng, RB), "RB", "I-VP"))
        toks.append((choice(rng, VBN), "VBN", "I-VP"))
    else:
        r2 = rng.random()
        if r2 < 0.55:
            v = choice(rng, VBD)
            ditransitive = v in DITRANSITIVE_VBD and rng.random() < 0.5
            toks.append((v, "VBD", "B-VP"))
        elif r2 < 0.8:
            toks.append((choice(rng, VBZ), "VBZ", "B-VP"))
        else:
            toks.append((choice(rng, VBP), "VBP", "B-VP"))
        if rng.random() < 0.10:
            tag = "VBG" if rng.random() < 0.6 else "VBN"
            toks.append((choice(rng, VBG if tag == "VBG" else VBN), tag, "I-VP"))
    if rng.random() < 0.12:
        toks.append((choice(rng, RP), "RP", "B-PRT"))
    if rng.random() < 0.12:
        toks.append(("to", "TO", "I-VP" if toks[-1][2].endswith("VP") else "B-VP"))
        toks.append((choice(rng, VB), "VB", "I-VP"))
    return toks, ditransitive


def gen_time_np(rng):
    return [(choice(rng, TIME_JJ), "JJ", "B-NP"), (choice(rng, TIME_NN), "NN", "I-NP")]


def gen_clause(rng, depth=0):
    toks = []
    if rng.random() < 0.06 and depth == 0:
        toks.append(("there", "EX", "B-NP"))
        if rng.random() < 0.6:
            toks.append(("is", "VBZ", "B-VP"))
        else:
            toks.append(("was", "VBD", "B-VP"))
        toks.extend(gen_np(rng))
        if rng.random() < 0.5:
            toks.extend(gen_pp(rng))
        return toks
    toks.extend(gen_np(rng))
    if depth == 0 and rng.random() < 0.07:
        # Appositive between commas, then the verb group.
        toks.append((",", ",", "O"))
        toks.extend(gen_np(rng, allow_split=False))
        toks.append((",", ",", "O"))
    elif depth == 0 and rng.random() < 0.15:
        # Relative pronoun right after the subject NP: an adjacent NP.
        r = rng.random()
        if r < 0.5:
            toks.append((choice(rng, WP), "WP", "B-NP"))
        elif r < 0.8:
            toks.append((choice(rng, WDT), "WDT", "B-NP"))
        else:
            toks.append(("whose", "WP$", "B-NP"))
            toks.append((choice(rng, NN), "NN", "I-NP"))
        vp, _ = gen_vp(rng)
        toks.extend(vp)
        if rng.random() < 0.5:
            toks.extend(gen_np(rng, allow_split=False))
    if rng.random() < 0.11:
        toks.extend(gen_advp(rng))
    vp, ditransitive = gen_vp(rng)
    toks.extend(vp)
    r = rng.random()
    if ditransitive:
        toks.extend(gen_np(rng, allow_split=False))
        toks.extend(gen_np(rng))  # directly adjacent object pair
    elif r < 0.38:
        toks.extend(gen_np(rng))
        r3 = rng.random()
        if r3 < 0.09:
            # Object list: two more NPs split by comma and conjunction.
            toks.append((",", ",", "O"))
            toks.extend(gen_np(rng, allow_split=False))
            toks.append((choice(rng, CC), "CC", "O"))
            toks.extend(gen_np(rng, allow_split=False))
        elif r3 < 0.17:
            # Reduced relative on the object.
            toks.append((choice(rng, VBN), "VBN", "B-VP"))
            toks.extend(gen_pp(rng))
        elif r3 < 0.45:
            toks.extend(gen_pp(rng))
    elif r < 0.56:
        toks.extend(gen_pp(rng))
    elif r < 0.64:
        r4 = rng.random()
        if r4 < 0.25:
            toks.append((choice(rng, RB), "RB", "B-ADJP"))
            toks.append((choice(rng, JJ), "JJ", "I-ADJP"))
        elif r4 < 0.5:
            toks.append((choice(rng, JJR), "JJR", "B-ADJP"))
            toks.append(("than", "IN", "B-PP"))
            toks.extend(gen_np(rng, allow_split=False))
        else:
            toks.append((choice(rng, JJ), "JJ", "B-ADJP"))
        if rng.random() < 0.4:
            toks.extend(gen_pp(rng))
    elif r < 0.72 and depth == 0:
        toks.append(("that", "IN", "B-SBAR"))
        toks.extend(gen_clause(rng, depth + 1))
    elif r < 0.84:
        toks.extend(gen_advp(rng))
        if rng.random() < 0.4:
            toks.extend(gen_pp(rng))
    # else: intransitive
    if rng.random() < 0.12:
        # Coordinated second verb group sharing the subject.
        if rng.random() < 0.3:
            toks.append((",", ",", "O"))
        toks.append((choice(rng, CC), "CC", "O"))
        vp2, _ = gen_vp(rng)
        toks.extend(vp2)
        r2 = rng.random()
        if r2 < 0.4:
            toks.extend(gen_np(rng, allow_split=False))
        elif r2 < 0.6:
            toks.extend(gen_pp(rng))
        elif r2 < 0.75:
            toks.extend(gen_advp(rng))
    if rng.random() < 0.13:
        toks.extend(gen_time_np(rng))
    if rng.random() < 0.07:
        toks.append(("to", "TO", "B-VP"))
        toks.append((choice(rng, VB), "VB", "I-VP"))
        toks.extend(gen_np(rng))
    if rng.random() < 0.10:
        toks.extend(gen_pp(rng))
    return toks


def gen_sentence(rng):
    toks = []
    r = rng.random()
    if r < 0.07:
        # Quoted clause, then the attribution.
        toks.append(("``", "``", "O"))
        toks.extend(gen_clause(rng, depth=1))
        toks.append((",", ",", "O"))
        toks.append(("''", "''", "O"))
        toks.append(("said", "VBD", "B-VP"))
        toks.extend(gen_np(rng, allow_split=False))
        toks.append((".", ".", "O"))
        return toks
    if r < 0.13:
        toks.extend(gen_pp(rng) if rng.random() < 0.6 else gen_advp(rng))
        toks.append((",", ",", "O"))
    elif r < 0.19:
        toks.append((choice(rng, WRB), "WRB", "B-ADVP"))
        toks.extend(gen_clause(rng, depth=1))
        toks.append((",", ",", "O"))
    elif r < 0.25:
        toks.append((choice(rng, SUB), "IN", "B-SBAR"))
        toks.extend(gen_clause(rng, depth=1))
        toks.append((",", ",", "O"))
    elif r < 0.30:
        toks.append((choice(rng, CC), "CC", "O"))
    toks.extend(gen_clause(rng))
    while rng.random() < 0.27 and len(toks) < 44:
        r2 = rng.random()
        if r2 < 0.20:
            toks.append((";", ":", "O"))
        elif r2 < 0.32:
            toks.append(("--", ":", "O"))
        elif r2 < 0.65:
            toks.append((",", ",", "O"))
            toks.append((choice(rng, CC), "CC", "O"))
        else:
            toks.append((choice(rng, CC), "CC", "O"))
        toks.extend(gen_clause(rng))
    if rng.random() < 0.03:
        toks.append((":", ":", "O"))
        toks.extend(gen_np(rng))
    toks.append((".", ".", "O"))
    return toks


def write_corpus(path, sentences):
    with open(path, "w") as fh:
        for sent in sentences:
            for w, p, c in sent:
                fh.write(f"{w} {p} {c}\n")
            fh.write("\n")


def diagnostics(sentences, left, right):
    windows = set()
    for sent in sentences:
        tags = [p for _, p, _ in sent]
        for i in range(len(tags)):
            window = []
            for off in range(i - left, i + right + 1):
                window.append(tags[off] if 0 <= off < len(tags) else "__EMPTY__")
            windows.add(tuple(window))
    return len(windows)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--train", type=int, default=3000)
    ap.add_argument("--test", type=int, default=450)
    ap.add_argument("--seed", type=int, default=310762)
    ap.add_argument("--train-out", default="data/sample_train.txt")
    ap.add_argument("--test-out", default="data/sample_test.txt")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    train = [gen_sentence(rng) for _ in range(args.train)]
    test = [gen_sentence(rng) for _ in range(args.test)]
    write_corpus(args.train_out, train)
    write_corpus(args.test_out, test)

    tokens = sum(len(s) for s in train)
    tagset = {p for s in train for _, p, _ in s}
    b_between = 0
    for s in train:
        in_np = False
        for _, _, c in s:
            np_now = c in ("B-NP", "I-NP")
            if np_now and c == "B-NP" and in_np:
                b_between += 1
            in_np = np_now
    print(f"train: {len(train)} sentences, {tokens} tokens, {len(tagset)} tags")
    print(f"adjacent-NP starts (B after reduction): {b_between}")
    for (l, r) in [(0, 0), (1, 0), (1, 1), (2, 1)]:
        print(f"distinct {l}-{r} windows: {diagnostics(train, l, r)}")
    print(f"test: {len(test)} sentences, {sum(len(s) for s in test)} tokens")


if __name__ == "__main__":
    main()
