#!/usr/bin/env python3
"""Generate the 20-sentence toy-language fixture used by the end-to-end
pipeline tests.

The "translation" is a deterministic word substitution (each word reversed),
so the expected silver data can be constructed directly, independent of the
alignment/projection code it will later be compared against.

Writes, under tests/fixtures/:
  toy_train_en.jsonl        gold English data (canonical records)
  toy_translations_xx.jsonl word-substituted translations, no parses
  toy_parallel.tsv          source<TAB>target token lines for align-train
  toy_gold_silver_xx.jsonl  expected silver data (direct substitution)

Run from the repository root:  python3 scripts/gen_toy_fixture.py
"""

import json
import re

SENTENCES = [
    ("play some elvis for me",
     "[IN:PLAY_MUSIC [SL:MUSIC_ARTIST_NAME elvis ] ]"),
    ("play some queen for me",
     "[IN:PLAY_MUSIC [SL:MUSIC_ARTIST_NAME queen ] ]"),
    ("play some elvis now",
     "[IN:PLAY_MUSIC [SL:MUSIC_ARTIST_NAME elvis ] ]"),
    ("play some queen now",
     "[IN:PLAY_MUSIC [SL:MUSIC_ARTIST_NAME queen ] ]"),
    ("play the song yesterday for me",
     "[IN:PLAY_MUSIC [SL:MUSIC_TRACK_TITLE yesterday ] ]"),
    ("play the song yesterday now",
     "[IN:PLAY_MUSIC [SL:MUSIC_TRACK_TITLE yesterday ] ]"),
    ("set an alarm for 8 am",
     "[IN:CREATE_ALARM [SL:DATE_TIME 8 am ] ]"),
    ("set an alarm for 9 pm",
     "[IN:CREATE_ALARM [SL:DATE_TIME 9 pm ] ]"),
    ("cancel my alarm for 8 am",
     "[IN:CANCEL_ALARM [SL:DATE_TIME 8 am ] ]"),
    ("cancel my alarm for 9 pm",
     "[IN:CANCEL_ALARM [SL:DATE_TIME 9 pm ] ]"),
    ("will it rain in madrid today",
     "[IN:GET_WEATHER [SL:WEATHER_ATTRIBUTE rain ] [SL:LOCATION madrid ] "
     "[SL:DATE_TIME today ] ]"),
    ("will it rain in boston tomorrow",
     "[IN:GET_WEATHER [SL:WEATHER_ATTRIBUTE rain ] [SL:LOCATION boston ] "
     "[SL:DATE_TIME tomorrow ] ]"),
    ("will it snow in madrid tomorrow",
     "[IN:GET_WEATHER [SL:WEATHER_ATTRIBUTE snow ] [SL:LOCATION madrid ] "
     "[SL:DATE_TIME tomorrow ] ]"),
    ("will it snow in boston today",
     "[IN:GET_WEATHER [SL:WEATHER_ATTRIBUTE snow ] [SL:LOCATION boston ] "
     "[SL:DATE_TIME today ] ]"),
    ("remind me to call grandma tomorrow",
     "[IN:CREATE_REMINDER [SL:TODO call grandma ] [SL:DATE_TIME tomorrow ] ]"),
    ("remind me to call dad today",
     "[IN:CREATE_REMINDER [SL:TODO call dad ] [SL:DATE_TIME today ] ]"),
    ("remind me to buy milk today",
     "[IN:CREATE_REMINDER [SL:TODO buy milk ] [SL:DATE_TIME today ] ]"),
    ("remind me to buy milk tomorrow",
     "[IN:CREATE_REMINDER [SL:TODO buy milk ] [SL:DATE_TIME tomorrow ] ]"),
    ("cancel my reminder to call grandma",
     "[IN:CANCEL_REMINDER [SL:TODO [IN:CREATE_CALL [SL:CONTACT grandma ] ] "
     "] ]"),
    ("cancel my reminder to call dad",
     "[IN:CANCEL_REMINDER [SL:TODO [IN:CREATE_CALL [SL:CONTACT dad ] ] ] ]"),
]


def substitute(word):
    return word[::-1]


def substitute_parse(parse):
    # Replace slot value tokens (lowercase words) with their substitutions;
    # brackets and IN:/SL: labels stay.
    def repl(m):
        return substitute(m.group(0))
    return re.sub(r"\b[a-z0-9']+\b(?![A-Z:])", repl, parse)


def record(idx, utterance, locale, parse=None):
    tokens = utterance.split()
    rec = {"id": "toy%02d" % (idx + 1), "locale": locale, "split": "train",
           "utterance": utterance, "tokens": tokens}
    if parse is not None:
        rec["parse"] = parse
    rec["provenance"] = "gold"
    return rec


def main():
    train, translations, parallel, silver = [], [], [], []
    for i, (utterance, parse) in enumerate(SENTENCES):
        words = utterance.split()
        target_words = [substitute(w) for w in words]
        target = " ".join(target_words)
        train.append(record(i, utterance, "en", parse))
        translations.append(record(i, target, "xx"))
        parallel.append(utterance + "\t" + target)
        gold = record(i, target, "xx", substitute_parse(parse))
        gold["provenance"] = "silver-tap"
        silver.append(gold)

    def dump(path, records):
        with open(path, "w") as f:
            for rec in records:
                f.write(json.dumps(rec, ensure_ascii=False,
                                   separators=(",", ":")) + "\n")

    dump("tests/fixtures/toy_train_en.jsonl", train)
    dump("tests/fixtures/toy_translations_xx.jsonl", translations)
    dump("tests/fixtures/toy_gold_silver_xx.jsonl", silver)
    with open("tests/fixtures/toy_parallel.tsv", "w") as f:
        f.write("\n".join(parallel) + "\n")
    print("wrote %d sentences" % len(SENTENCES))


if __name__ == "__main__":
    main()
