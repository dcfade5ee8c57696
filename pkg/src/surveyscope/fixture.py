"""Deterministic synthetic survey generator.

Emits a community-survey-shaped table (age, state, referral source, contact
channels, favorite meal, weather, and a sparse free-comment column) from a
seeded grammar.  Used by tests and demos so nothing depends on a real
dataset or a generative model being available.
"""

from __future__ import annotations

import random

from .ingest import RawTable, SourceMeta, to_csv_bytes

DEFAULT_ROWS = 1020

COL_AGE = "Age"
COL_STATE = "State"
COL_REFERRAL = "How did you hear about us?"
COL_CHANNELS = "Contact channels"
COL_MEAL = "What is your favorite meal?"
COL_WEATHER = "How's the weather today?"
COL_EXTRA = "Anything else?"

COLUMNS = (COL_AGE, COL_STATE, COL_REFERRAL, COL_CHANNELS, COL_MEAL, COL_WEATHER, COL_EXTRA)

_STATES = [
    "Alabama", "Alaska", "Arizona", "Arkansas", "California", "Colorado",
    "Connecticut", "Delaware", "Florida", "Georgia", "Hawaii", "Idaho",
    "Illinois", "Indiana", "Iowa", "Kansas", "Kentucky", "Louisiana", "Maine",
    "Maryland", "Massachusetts", "Michigan", "Minnesota", "Mississippi",
    "Missouri", "Montana", "Nebraska", "Nevada", "New Hampshire", "New Jersey",
    "New Mexico", "New York", "North Carolina", "North Dakota", "Ohio",
    "Oklahoma", "Oregon", "Pennsylvania", "Rhode Island", "South Carolina",
    "South Dakota", "Tennessee", "Texas", "Utah", "Vermont", "Virginia",
    "Washington", "West Virginia", "Wisconsin", "Wyoming",
]

_REFERRALS = [
    "A friend or family member",
    "Social media",
    "Local newsletter",
    "Flyer at the library",
    "Community event",
    "Online search",
]

_CHANNEL_ATOMS = ["Email", "SMS", "Phone call", "Paper mail"]

_MEAL_TOPICS = {
    "thai": {
        "dishes": ["pad thai", "green curry", "tom yum soup", "massaman curry", "drunken noodles", "mango sticky rice"],
        "extras": ["extra lime", "crushed peanuts", "a side of jasmine rice", "fresh basil", "chili flakes"],
        "templates": [
            "I love {dish} with {extra}, it reminds me of home.",
            "Nothing beats {dish}; I always ask for {extra}.",
            "My favorite is {dish} from the place downtown, with {extra}.",
            "Definitely {dish}. The trick is {extra}.",
            "{dish} every time, especially with {extra}.",
        ],
    },
    "italian": {
        "dishes": ["lasagna", "carbonara", "margherita pizza", "mushroom risotto", "gnocchi", "eggplant parmesan"],
        "extras": ["lots of parmesan", "garlic bread on the side", "a simple salad", "fresh basil on top", "a glass of red"],
        "templates": [
            "Homemade {dish} with {extra} is my comfort food.",
            "I could eat {dish} every week, ideally with {extra}.",
            "My grandmother's {dish}, served with {extra}.",
            "{dish}, no contest. Add {extra} and I'm happy.",
            "A big plate of {dish} with {extra}.",
        ],
    },
    "breakfast": {
        "dishes": ["blueberry pancakes", "a veggie omelette", "french toast", "breakfast burritos", "shakshuka", "biscuits and gravy"],
        "extras": ["real maple syrup", "crispy bacon", "strong black coffee", "fresh orange juice", "hot sauce"],
        "templates": [
            "Breakfast food! {dish} with {extra} on a slow morning.",
            "I'm a breakfast person: {dish} and {extra}.",
            "Weekend {dish} with {extra}, hands down.",
            "{dish} with {extra}. Breakfast for dinner counts too.",
            "Give me {dish} and {extra} any day.",
        ],
    },
    "barbecue": {
        "dishes": ["slow-smoked brisket", "pulled pork", "baby back ribs", "grilled chicken thighs", "smoked sausage"],
        "extras": ["tangy coleslaw", "cornbread", "pickles and onions", "baked beans", "extra sauce"],
        "templates": [
            "{dish} off the smoker with {extra}.",
            "Backyard barbecue: {dish}, {extra}, paper towels.",
            "I smoke my own {dish}; serve it with {extra}.",
            "{dish} with {extra}, eaten outside in summer.",
            "Low and slow {dish} and a pile of {extra}.",
        ],
    },
    "home": {
        "dishes": ["chicken noodle soup", "beef stew", "mac and cheese", "pot roast", "chicken pot pie", "meatloaf"],
        "extras": ["crusty bread", "mashed potatoes", "a green salad", "buttered peas", "gravy"],
        "templates": [
            "Simple {dish} with {extra}, like my mom made.",
            "On a cold day, {dish} and {extra}.",
            "{dish} with {extra}. Nothing fancy, always good.",
            "Sunday {dish} with {extra} and the family around.",
            "A bowl of {dish} and some {extra}.",
        ],
    },
}

_WEATHER_CONDITIONS = [
    "sunny and bright", "gray and drizzly", "cold with a sharp wind", "humid and sticky",
    "snowing softly", "perfectly mild", "stormy with heavy rain", "foggy this morning",
    "crisp and clear", "hot enough to stay inside",
]
_WEATHER_NOTES = [
    "down by the river", "on our side of town", "since early morning", "after last night's front",
    "for the third day running", "though the forecast disagrees", "which suits me fine",
    "so the garden is happy", "and the kids are thrilled", "if you can believe it",
]
_WEATHER_TEMPLATES = [
    "It's {cond} here today, {note}.",
    "Honestly {cond}, typical for this time of year, {note}.",
    "{cond}, {note}, so I'm staying in with a book.",
    "We've had {cond} weather all week, {note}.",
    "{cond} right now, {note}, but it should change by evening.",
    "It was {cond} when I walked the dog, {note}.",
]

_EXTRA_COMMENTS = [
    "Thanks for asking us about this, the last survey led to real changes.",
    "Please add an option for evening events, daytime ones are hard to attend.",
]


def generate_survey(rows: int = DEFAULT_ROWS, seed: int = 0) -> RawTable:
    """Build a deterministic ``rows``-row survey table."""
    rng = random.Random(seed)
    extra_rows = {rows // 10: _EXTRA_COMMENTS[0], (rows * 7) // 10: _EXTRA_COMMENTS[1]}
    topic_names = list(_MEAL_TOPICS)

    out: list[dict[str, str]] = []
    for i in range(rows):
        age = str(rng.randint(16, 80))
        state = rng.choice(_STATES)
        referral = rng.choice(_REFERRALS) if rng.random() > 0.05 else ""

        r = rng.random()
        if r < 0.12:
            channels = ""
        elif r < 0.55:
            channels = rng.choice(_CHANNEL_ATOMS)
        else:
            n = 2 if r < 0.9 else 3
            channels = "; ".join(rng.sample(_CHANNEL_ATOMS, n))

        if rng.random() > 0.03:
            topic = _MEAL_TOPICS[rng.choice(topic_names)]
            meal = rng.choice(topic["templates"]).format(
                dish=rng.choice(topic["dishes"]), extra=rng.choice(topic["extras"])
            )
        else:
            meal = ""

        if rng.random() > 0.08:
            weather = rng.choice(_WEATHER_TEMPLATES).format(
                cond=rng.choice(_WEATHER_CONDITIONS), note=rng.choice(_WEATHER_NOTES)
            )
        else:
            weather = ""

        out.append(
            {
                COL_AGE: age,
                COL_STATE: state,
                COL_REFERRAL: referral,
                COL_CHANNELS: channels,
                COL_MEAL: meal,
                COL_WEATHER: weather,
                COL_EXTRA: extra_rows.get(i, ""),
            }
        )

    return RawTable(
        columns=COLUMNS,
        rows=tuple(out),
        row_ids=tuple(range(rows)),
        source_meta=SourceMeta(format="fixture", original_row_count=rows),
    )


def fixture_csv_bytes(rows: int = DEFAULT_ROWS, seed: int = 0) -> bytes:
    return to_csv_bytes(generate_survey(rows, seed))


if __name__ == "__main__":
    import argparse
    import sys

    parser = argparse.ArgumentParser(description="Write the synthetic survey fixture as CSV")
    parser.add_argument("--rows", type=int, default=DEFAULT_ROWS)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="-")
    args = parser.parse_args()
    data = fixture_csv_bytes(args.rows, args.seed)
    if args.out == "-":
        sys.stdout.buffer.write(data)
    else:
        with open(args.out, "wb") as fh:
            fh.write(data)
