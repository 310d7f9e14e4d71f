"""Independent YAKE feature table for the two-sentence toy text used in the
extraction tests and the acceptance check. Prints C++ initialisers.

Term features follow Campos et al.: casing, position, frequency,
relatedness (window 1), dispersion; candidate score = prod(S) / (tf * (1 + sum(S)))."""
import math
import pathlib
import re
import statistics

TEXT = ("Telomere attrition limits lifespan in aged mice. "
        "Short telomere length predicts mortality and aging.")

def stopwords():
    path = pathlib.Path(__file__).resolve().parents[2] / "data" / "stopwords_en.txt"
    return {w.strip() for w in path.read_text().split("\n") if w.strip() and not w.startswith("#")}

def main():
    sw = stopwords()
    sentences = [re.findall(r"[A-Za-z0-9]+", s) for s in re.split(r"(?<=[.!?])\s+", TEXT.strip())]
    terms = {}
    order = []
    for si, sent in enumerate(sentences):
        for i, surf in enumerate(sent):
            w = surf.lower()
            if w in sw:
                continue
            t = terms.get(w)
            if t is None:
                t = terms[w] = dict(tf=0, up=0, acr=0, sents=set(), left=[], right=[])
                order.append(w)
            t["tf"] += 1
            if len(surf) > 1 and surf.isupper():
                t["acr"] += 1
            elif i > 0 and surf[0].isupper():
                t["up"] += 1
            t["sents"].add(si)
            if i > 0:
                t["left"].append(sent[i - 1].lower())
            if i + 1 < len(sent):
                t["right"].append(sent[i + 1].lower())
    tfs = [terms[w]["tf"] for w in order]
    mean = sum(tfs) / len(tfs)
    std = statistics.pstdev(tfs)
    max_tf = max(tfs)
    n_sent = len(sentences)
    score = {}
    print("// term, tf, casing, position, frequency, relatedness, dispersion, score")
    for w in order:
        t = terms[w]
        tf = t["tf"]
        casing = max(t["up"], t["acr"]) / (1 + math.log(tf))
        position = math.log(math.log(3 + statistics.median(sorted(t["sents"]))))
        freq = tf / (mean + std)
        dl = len(set(t["left"])) / len(t["left"]) if t["left"] else 0.0
        dr = len(set(t["right"])) / len(t["right"]) if t["right"] else 0.0
        rel = 1 + (dl + dr) * tf / max_tf
        disp = len(t["sents"]) / n_sent
        s = rel * position / (casing + freq / rel + disp / rel)
        score[w] = s
        print(f'{{"{w}", {tf}, {casing!r}, {position!r}, {freq!r}, {rel!r}, {disp!r}, {s!r}}},')
    # Candidates: runs of 1..3 consecutive non-stopwords inside a sentence.
    cands = {}
    for sent in sentences:
        low = [x.lower() for x in sent]
        for i in range(len(low)):
            for n in range(1, 4):
                gram = low[i:i + n]
                if len(gram) < n or any(g in sw for g in gram):
                    break
                key = " ".join(gram)
                cands[key] = cands.get(key, 0) + 1
    ranked = []
    for key, tf in cands.items():
        ws = key.split()
        prod = math.prod(score[w] for w in ws)
        ranked.append((prod / (tf * (1 + sum(score[w] for w in ws))), key))
    ranked.sort()
    print("// ranking")
    for s, key in ranked:
        print(f'{{"{key}", {s!r}}},')

if __name__ == "__main__":
    main()
