#!/usr/bin/env python3
"""Regenerate src/bciui/data/corpus.txt.

Builds the bundled training corpus (~10^5 tokens) of everyday
conversational sentences composed from templates over the bundled
lexicon's vocabulary, so the whole pipeline (speech synthesis ->
decoding -> language model) shares one closed vocabulary. One sentence
per line, lowercase, whitespace-tokenized. Deterministic for SEED.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

SEED = 20240717
TARGET_TOKENS = 100_000

PEOPLE = ["friend", "sister", "brother", "mother", "father", "son",
          "daughter", "wife", "nurse", "doctor", "partner", "teacher"]
DRINKS = ["water", "coffee", "tea", "juice", "milk"]
FOODS = ["bread", "cheese", "soup", "salad", "rice", "pasta", "pizza",
         "chicken", "fish", "fruit", "an apple", "a banana", "an orange",
         "a snack", "an egg"]
MEALS = ["breakfast", "lunch", "dinner"]
PLACES = ["the kitchen", "the bedroom", "the bathroom", "the office",
          "the garden", "the park", "the store", "the hospital", "the beach"]
THINGS = ["the phone", "the computer", "the tablet", "the laptop",
          "the television", "the radio", "the book", "the blanket",
          "the pillow", "my glasses", "the remote"]
MEDIA = ["a movie", "the news", "a video", "the game", "a show", "music"]
DAYS = ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday",
        "sunday", "today", "tomorrow", "tonight"]
FEELINGS = ["happy", "tired", "hungry", "thirsty", "cold", "warm", "fine",
            "great", "comfortable", "sick", "ready", "sleepy-free"]
ADJUST = ["the light", "the fan", "the heat", "the window", "the door",
          "the screen", "my chair", "my pillow"]
ACTIONS = ["read", "rest", "relax", "sleep", "eat", "drink", "talk",
           "listen", "watch", "write", "work", "play", "paint"]
WEATHER = ["sunny", "cold", "warm", "nice", "bad", "beautiful"]

FIXED = [
    ("hello how are you", 140),
    ("hello how are you today", 50),
    ("i am fine thank you", 70),
    ("thank you very much", 60),
    ("good morning", 80),
    ("good night", 60),
    ("good afternoon", 40),
    ("see you later", 40),
    ("see you tomorrow", 30),
    ("i love you", 60),
    ("yes please", 50),
    ("no thank you", 50),
    ("that is great", 30),
    ("that is fine", 30),
    ("that is wrong", 15),
    ("that is right", 20),
    ("i do not know", 40),
    ("i am not sure", 30),
    ("please wait a minute", 25),
    ("can you help me please", 40),
    ("i need help", 45),
    ("come here please", 30),
    ("how was your day", 35),
    ("what time is it", 35),
    ("what is for dinner", 25),
    ("i am ready now", 25),
    ("it is time for bed", 20),
    ("please turn on the light", 25),
    ("please turn off the light", 25),
    ("thank you for your help", 30),
    ("you are welcome", 35),
    ("excuse me please", 20),
    ("i am sorry", 30),
    ("do not worry-free", 0),
]

TEMPLATES = [
    ("i want to {action}", 30),
    ("i want some {drink}", 25),
    ("i want to eat {food}", 20),
    ("i want to watch {media}", 25),
    ("i would like some {drink}", 20),
    ("i would like {food} please", 15),
    ("can i have some {drink} please", 20),
    ("can i have {food} please", 15),
    ("i need some {drink}", 15),
    ("i need my medicine now", 10),
    ("i need to go to {place}", 20),
    ("please bring me {thing}", 20),
    ("please bring me some {drink}", 15),
    ("please open {adjust}", 12),
    ("please close {adjust}", 12),
    ("please turn on {adjust}", 14),
    ("please turn off {adjust}", 14),
    ("please adjust {adjust}", 10),
    ("can you move {thing} please", 10),
    ("can you check {thing}", 10),
    ("i am {feeling}", 35),
    ("i feel {feeling} today", 20),
    ("i am very {feeling}", 15),
    ("are you {feeling}", 10),
    ("my {person} is coming {day}", 15),
    ("my {person} called me {day}", 12),
    ("i talked to my {person} {day}", 12),
    ("i saw my {person} yesterday", 10),
    ("tell my {person} i said hello", 12),
    ("where is my {person}", 10),
    ("where is {thing}", 15),
    ("what time is {meal}", 10),
    ("is {meal} ready", 12),
    ("{meal} was very good", 12),
    ("i enjoyed {meal} today", 8),
    ("the weather is {weather} today", 15),
    ("it is a {weather} day", 10),
    ("i want to go to {place}", 18),
    ("we went to {place} yesterday", 10),
    ("let us go to {place} {day}", 10),
    ("i watched {media} last night", 12),
    ("the {sport} game is on {day}", 10),
    ("our team won the game", 8),
    ("did you watch the game", 10),
    ("i read a good book this week", 8),
    ("please call the {person}", 10),
    ("the {person} will come {day}", 10),
    ("i have an appointment on {day}", 10),
    ("what day is it today", 10),
    ("it is time for my medicine", 10),
    ("i slept well last night", 12),
    ("i did not sleep well", 10),
    ("my back hurts a little", 8),
    ("i feel much better now", 12),
    ("that was very funny", 10),
    ("you are very kind", 10),
    ("this is my favorite song", 8),
    ("please play some music", 12),
    ("turn the volume-free down", 0),
    ("i will rest for an hour", 8),
    ("wake me up in an hour", 8),
    ("please check my email", 10),
    ("i got a message from my {person}", 8),
    ("send a message to my {person}", 10),
    ("the computer is not working", 8),
    ("please move the cursor up", 6),
    ("please move the cursor down", 6),
    ("happy birthday to you", 8),
    ("the party is on {day}", 8),
    ("thank you for the gift", 8),
]

SLOTS = {
    "person": PEOPLE,
    "drink": DRINKS,
    "food": FOODS,
    "meal": MEALS,
    "place": PLACES,
    "thing": THINGS,
    "media": MEDIA,
    "day": DAYS,
    "feeling": [f for f in FEELINGS if "-" not in f],
    "adjust": ADJUST,
    "action": ACTIONS,
    "weather": WEATHER,
    "sport": ["football", "baseball", "basketball"],
}


def load_vocab(lexicon_path: Path) -> set[str]:
    vocab = set()
    for line in lexicon_path.read_text(encoding="utf-8").splitlines():
        vocab.add(line.split("\t")[0])
    return vocab


def render(template: str, rng: random.Random) -> str:
    out = template
    while "{" in out:
        start = out.index("{")
        end = out.index("}", start)
        slot = out[start + 1:end]
        out = out[:start] + rng.choice(SLOTS[slot]) + out[end + 1:]
    return out


def main() -> None:
    root = Path(__file__).resolve().parent.parent / "src" / "bciui" / "data"
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else root / "corpus.txt"
    vocab = load_vocab(root / "lexicon.txt")
    rng = random.Random(SEED)

    weighted: list[tuple[str, int, bool]] = []
    for text, w in FIXED:
        if w > 0:
            weighted.append((text, w, False))
    for tpl, w in TEMPLATES:
        if w > 0:
            weighted.append((tpl, w, True))
    choices = [item[0] for item in weighted]
    weights = [item[1] for item in weighted]
    is_template = {item[0]: item[2] for item in weighted}

    lines: list[str] = []
    tokens = 0
    while tokens < TARGET_TOKENS:
        picked = rng.choices(choices, weights=weights, k=1)[0]
        sentence = render(picked, rng) if is_template[picked] else picked
        words = sentence.split()
        missing = [w for w in words if w not in vocab]
        if missing:
            raise SystemExit(f"out-of-lexicon words {missing} in {sentence!r}")
        lines.append(sentence)
        tokens += len(words)

    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} sentences / {tokens} tokens to {out}")


if __name__ == "__main__":
    main()
