#!/usr/bin/env python3
"""Regenerates the synthetic construction fixtures.

Writes seeds_synthetic.jsonl (500 ambiguous-query seed entries about
fictional entities), noise_pool.jsonl (off-topic passages) and
distractors.txt (replacement entities). Output is deterministic.
"""
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
rng = random.Random(20250417)

FILLER = (
    "river valley market council harbor museum archive winter summer station bridge library garden "
    "school festival railway village orchard foundry mill tower square theatre chapel academy "
    "report survey journal committee league season record charter district province coast island "
    "meadow canal workshop gallery observatory quarry lighthouse estate manor abbey parish county "
    "annual local regional historic notable early later famous modest quiet busy northern southern "
    "eastern western central small large new old public private former current several many "
    "was were became remained served joined opened closed founded moved returned described noted "
    "built restored expanded visited published organized recorded praised studied taught led "
    "with from into during after before across between under over near beside through about"
).split()

SYLLABLES = "ka ri to mel vor an sel dun bra ith ol fen gar lis mo ren tav ul ques wyn zor pe nad hal".split()
CITY_SUFFIX = ["ford", "ton", "wick", "dale", "mouth", "haven", "field", "bury"]


def word():
    return rng.choice(FILLER)


def name():
    parts = rng.randint(2, 3)
    return "".join(rng.choice(SYLLABLES) for _ in range(parts)).capitalize()


def person():
    return f"{name()} {name()}"


def city():
    return name() + rng.choice(CITY_SUFFIX)


def filler(n):
    return " ".join(word() for _ in range(n))


KINDS = [
    ("In which year was {e} founded?", lambda: str(rng.randint(1600, 2020))),
    ("Who directed {e}?", person),
    ("Where is {e} located?", city),
    ("In which year was {e} born?", lambda: str(rng.randint(1700, 2005))),
    ("Who wrote {e}?", person),
]


def passage(answer, mentions, length):
    words = filler(length).split()
    for _ in range(mentions):
        words.insert(rng.randint(0, len(words)), answer)
    return " ".join(words)


def entry(i):
    template, make_answer = rng.choice(KINDS)
    entity = name() + " " + name()
    answers = []
    target = rng.randint(1, 4)
    while len(answers) < target:
        a = make_answer()
        if a not in answers:
            answers.append(a)
    dis = []
    for a in answers:
        docs = []
        for k in range(rng.randint(1, 3)):
            length = rng.randint(30, 150)
            # the first document always mentions the answer
            mentions = rng.choice([1, 1, 2, 3] if k == 0 else [0, 1, 1, 2, 3])
            docs.append({"text": passage(a, mentions, length), "source": f"synthetic://{i}/{len(docs)}"})
        dis.append({"answer": a, "query": template.format(e=f"{entity} ({a})"), "documents": docs})
    return {"id": f"syn-{i:03d}", "ambiguous_query": template.format(e=entity), "disambiguations": dis}


def main():
    with open(HERE / "seeds_synthetic.jsonl", "w") as f:
        for i in range(500):
            f.write(json.dumps(entry(i)) + "\n")
    with open(HERE / "noise_pool.jsonl", "w") as f:
        for i in range(120):
            f.write(json.dumps({"text": filler(rng.randint(40, 90)), "source": f"noise://{i}"}) + "\n")
    with open(HERE / "distractors.txt", "w") as f:
        for _ in range(40):
            f.write(rng.choice([str(rng.randint(1600, 2020)), person(), city()]) + "\n")


if __name__ == "__main__":
    main()
