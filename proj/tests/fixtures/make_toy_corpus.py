#!/usr/bin/env python3
"""Generates the 40-article toy corpus and its expected ingestion result.

The expected counts are computed here with an independent implementation of
the cleaning rules (Python regexes and the csv module) and frozen into
toy_corpus_expected.json, which the C++ tests compare against.

Run from this directory:  python3 make_toy_corpus.py
"""

import csv
import io
import json
import math
import random
import re
from collections import OrderedDict

THEMES = {
    "vaccine": ["vaccine", "vaccination", "dose", "immunity", "antibody", "booster",
                "efficacy", "trial", "adverse", "mrna", "hesitancy", "coverage"],
    "asthma": ["asthma", "allergy", "pollution", "air", "particulate", "respiratory",
               "inhaler", "airway", "exposure", "ozone", "wheeze", "pollen"],
    "aviation": ["aviation", "airport", "airline", "security", "passenger", "flight",
                 "screening", "travel", "border", "cabin", "crew", "law"],
    "education": ["school", "student", "teacher", "online", "learning", "classroom",
                  "remote", "university", "curriculum", "campus", "exam", "lecture"],
    "publichealth": ["policy", "health", "public", "mortality", "surveillance",
                     "community", "intervention", "lockdown", "mask", "distancing",
                     "outbreak", "hospital"],
}
FILLER = ["the", "of", "and", "in", "to", "was", "were", "with", "for", "this",
          "study", "results", "patients", "data", "during", "pandemic"]

AUTHORS = {
    "vaccine": ["Maria Lopez", "Chen Wei"],
    "asthma": ["Anna  Kowalski", "Ruwan Perera"],
    "aviation": ["R. Abeyratne"],
    "education": ["Sam Okafor", "Lena Fischer"],
    "publichealth": ["T. Tulchinsky", "Priya Nair"],
}
JOURNALS = {
    "vaccine": ["Vaccine", "Journal of Vaccines & Immunity"],
    "asthma": ["World Allergy Organization Journal", "Current Allergy and Asthma Reports"],
    "aviation": ["Air & Space Law"],
    "education": ["Computers & Education"],
    "publichealth": ["The Lancet Public Health", "BMJ Global Health"],
}

CITIES = ["Lisbon", "Oslo", "Nairobi", "Lima", "Hanoi", "Quito", "Dakar", "Tunis",
          "Perth", "Leeds", "Porto", "Turin", "Kyoto", "Seoul", "Accra", "Cairo",
          "Dublin", "Geneva", "Havana", "Jakarta", "Kampala", "Lagos", "Madrid", "Manila",
          "Milan", "Mumbai", "Munich", "Naples", "Ottawa", "Paris", "Prague", "Riga",
          "Rome", "Santiago", "Sydney", "Tehran", "Toronto", "Valencia", "Vienna", "Warsaw"]

STOPWORDS = ["the", "of", "and", "in", "to", "was", "were", "with", "for", "this",
             "a", "an", "is", "are", "on", "by", "we", "our", "that", "from", "as", "at"]


def make_body(rng, theme, n):
    words = []
    for _ in range(n):
        if rng.random() < 0.3:
            words.append(rng.choice(FILLER))
        else:
            words.append(rng.choice(THEMES[theme]))
    # A few capitalized sentence starts and punctuation.
    out = []
    for i, w in enumerate(words):
        if i % 9 == 0:
            w = w.capitalize()
        out.append(w)
        if i % 9 == 8:
            out[-1] += "."
        elif i % 5 == 4:
            out[-1] += ","
    return " ".join(out)


def build_rows():
    rng = random.Random(20210719)
    theme_names = list(THEMES)
    rows = []
    for i in range(40):
        theme = theme_names[i % len(theme_names)]
        author = AUTHORS[theme][(i // 5) % len(AUTHORS[theme])]
        journal = JOURNALS[theme][(i // 10) % len(JOURNALS[theme])]
        t1, t2 = rng.sample(THEMES[theme], 2)
        city = CITIES[i]
        title = f"{t1.capitalize()} and {t2} in the {city} COVID-19 cohort ({2020 + i % 2})"
        abstract = f"We examine {t1} and {t2} across the {city} cohort."
        body = make_body(rng, theme, 30 + (i % 7) * 5)
        rows.append(OrderedDict(title=title, abstract=abstract, first_author=author,
                                journal=journal, body=body))

    # Duplicate title after cleaning (case, digits and punctuation differ).
    rows[7]["title"] = rows[3]["title"].upper().replace("COHORT", "COHORT!! 7")
    # Duplicate abstract (whitespace and case differ).
    rows[12]["abstract"] = "  " + rows[5]["abstract"].upper() + " "
    # Nucleotide runs and nonsense tokens.
    rows[20]["body"] += " Primer acgtacgtacgtacgt and ttgacaggcattuu bound. xkcdzz aaaaebbbb qwrtplkz"
    rows[21]["body"] += " The sequence GATTACAGATTACA was removed, cat is short."
    # Non-English body.
    rows[25]["body"] = "Η πανδημία επηρέασε την εκπαίδευση και την υγεία σε όλο τον κόσμο. " * 3
    # Names that only occur capitalized in one document.
    rows[14]["body"] += " Tulchinsky reviewed policy with Okonkwo."
    rows[19]["body"] += " Abeyratne discussed aviation law."
    # Quoting: commas, quotes and an embedded newline inside fields.
    rows[30]["title"] = 'Masks, "distancing" and lockdown: a review'
    rows[31]["body"] = rows[31]["body"] + '\nSecond paragraph with "quoted" mask policy, outbreak.'
    # Digits and specials in the journal name.
    rows[33]["journal"] = "Health 2030 & Policy (Online)!"
    return rows


def write_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)


# ---- independent oracle ----------------------------------------------------

def clean_text(s):
    s = re.sub(r"[0-9]", "", s)
    words = re.findall(r"[A-Za-z]+", s)
    return " ".join(w.lower() for w in words)


def non_ascii_fraction(s):
    ascii_letters = sum(1 for ch in s if ch.isascii() and ch.isalpha())
    other = sum(1 for ch in s if not ch.isascii())
    total = ascii_letters + other
    return 0.0 if total == 0 else other / total


def is_nonsense(tok):
    if re.search(r"(.)\1{3}", tok):
        return True
    if re.search(r"[^aeiouy]{6}", tok):
        return True
    return not re.search(r"[aeiouy]", tok)


def tokenize(body, stop):
    out = []
    for raw in re.findall(r"[A-Za-z]+", body):
        if len(raw) < 3:
            continue
        w = raw.lower()
        if w in stop:
            continue
        if re.fullmatch(r"[acgtu]{8,}", w):
            continue
        if is_nonsense(w):
            continue
        out.append(w)
    return out


def oracle(path, stop):
    with open(path, newline="", encoding="utf-8") as f:
        records = list(csv.DictReader(f))
    loaded = len(records)
    kept = []
    for r in records:
        if not r["body"].strip():
            continue
        if non_ascii_fraction(r["body"]) > 0.3:
            continue
        r = dict(r)
        r["title"] = clean_text(r["title"])
        r["journal"] = clean_text(r["journal"])
        r["first_author"] = " ".join(r["first_author"].split())
        kept.append(r)
    after_cleaning = len(kept)
    seen_t, seen_a, deduped = set(), set(), []
    for r in kept:
        t, a = clean_text(r["title"]), clean_text(r["abstract"])
        if (t and t in seen_t) or (a and a in seen_a):
            continue
        if t:
            seen_t.add(t)
        if a:
            seen_a.add(a)
        deduped.append(r)

    usage = {}
    for d, r in enumerate(deduped):
        for raw in re.findall(r"[A-Za-z]+", r["body"]):
            u = usage.setdefault(raw.lower(), {"lower": False, "docs": set()})
            if not raw[0].isupper():
                u["lower"] = True
            u["docs"].add(d)
    names = {w for w, u in usage.items() if not u["lower"] and len(u["docs"]) < 2}

    axes = {"author": [], "document": [], "journal": [], "word": []}
    index = {k: {} for k in axes}

    def intern(mode, label):
        if label not in index[mode]:
            index[mode][label] = len(axes[mode])
            axes[mode].append(label)
        return index[mode][label]

    counts = {}
    total_tokens = 0
    for r in deduped:
        toks = [w for w in tokenize(r["body"], stop) if w not in names]
        if not toks:
            continue
        a = intern("author", r["first_author"] or "(unknown-author)")
        p = intern("document", r["title"])
        j = intern("journal", r["journal"] or "(unknown-journal)")
        for w in toks:
            key = (a, p, j, intern("word", w))
            counts[key] = counts.get(key, 0) + 1
            total_tokens += 1

    return {
        "loaded": loaded,
        "after_cleaning": after_cleaning,
        "after_dedup": len(deduped),
        "names_removed": sorted(names),
        "axes": axes,
        "nnz": len(counts),
        "total_tokens": total_tokens,
        "sum_log1p": math.fsum(math.log(1 + c) for c in counts.values()),
        "counts": [[a, p, j, w, c] for (a, p, j, w), c in sorted(counts.items())],
    }


def main():
    rows = build_rows()
    write_csv(rows, "toy_corpus.csv")
    with open("toy_stopwords.txt", "w", encoding="utf-8") as f:
        f.write("# stopwords for the toy corpus\n")
        for w in STOPWORDS:
            f.write(w + "\n")
    expected = oracle("toy_corpus.csv", set(STOPWORDS))
    with open("toy_corpus_expected.json", "w", encoding="utf-8") as f:
        json.dump(expected, f, indent=1)
        f.write("\n")
    print(f"loaded {expected['loaded']}, cleaned {expected['after_cleaning']}, "
          f"dedup {expected['after_dedup']}, nnz {expected['nnz']}, "
          f"words {len(expected['axes']['word'])}, names {expected['names_removed']}")


if __name__ == "__main__":
    main()
