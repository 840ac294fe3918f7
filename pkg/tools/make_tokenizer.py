#!/usr/bin/env python3
"""Build the vendored byte-level BPE artifact and its golden files.

Steps, all deterministic:
  1. write the 1,000-word list shipped with the package
  2. synthesize a training corpus from it (seeded), then train a
     byte-level BPE tokenizer with the HuggingFace `tokenizers` library
     and save vocab.json + merges.txt in the published format
  3. generate 1,000 golden sentences (different seed) and encode them
     with the HuggingFace tokenizer, which acts as the independent
     reference implementation; freeze the ids as a committed golden file

The in-repo encoder must then agree with the golden file token-for-token.
Requires `pip install tokenizers` (build-time only; not a runtime dep).

Run from the repo root: python tools/make_tokenizer.py
"""

import json
import random
from pathlib import Path

from tokenizers import Tokenizer, decoders, models, pre_tokenizers, trainers

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "src" / "vertext" / "data"
ARTIFACT_DIR = DATA / "tokenizer"
FIXTURES = ROOT / "tests" / "fixtures"

CORPUS_SEED = 20240917
GOLDEN_SEED = 31337
VOCAB_SIZE = 8000

WORDS_RAW = """
time year people way day man woman child world life
hand part eye place work week case point company number
group problem fact home water room mother father area money
story month book word side house friend power hour game
line city family name school state student country night light
thing sound house job side kind head far try idea
body back face others level office door health person art
war history party result change morning reason research girl guy
moment air teacher force education foot boy age policy process
music market sense nation plan college interest death experience effect
use class control care field development role effort rate heart
drug show leader law road form action model relationship view
community town report pressure director position player record paper space
ground letter energy court price series piece news voice study
film movie review actor scene plot script ending character director
camera sound track theme style tone pace dialogue acting cast
go see know take get give find think tell become
show leave feel put bring begin keep hold write stand
hear let mean set meet run pay sit speak lie
lead read grow lose fall send build understand draw break
spend cut rise drive buy wear choose seem help talk
turn start might move like work live believe happen must
write provide sit stand lose pay meet include continue learn
change watch follow stop create speak allow add spend open
walk win offer remember love consider appear wait serve die
send expect stay fall reach kill remain suggest raise pass
sell require report decide pull good new first last long
great little own other old right big high different small
large next early young important public bad same able human
local sure better best low late general specific certain free
open whole short easy strong special clear recent full sweet
fine nice true happy sorry real poor natural significant similar
hot dead central final main green nice huge popular serious
ready simple left physical federal entire close dark common single
private wonderful charming delightful marvelous stunning glorious splendid uplifting engaging majestic
terrible horrible dreadful miserable wretched appalling atrocious unbearable depressing tiresome
vertical horizontal diagonal upright sideways upward downward slanted stacked aligned
overburdened complicated banal plotting swaggers idiot talented surprise appears throughout
quick brown fox jumps lazy dog pack quartz jinxed vexed
apple orange banana grape lemon melon cherry peach plum berry
table chair desk shelf lamp couch stool bench drawer cabinet
river ocean lake stream pond creek valley hill cliff shore
rain snow wind storm cloud fog mist thunder frost breeze
red blue yellow purple pink brown black white gray silver
gold iron steel copper stone brick glass wood cloth paper
bread milk cheese butter sugar salt pepper honey flour rice
dinner lunch supper snack feast meal taste flavor recipe kitchen
doctor nurse lawyer judge farmer baker driver pilot sailor singer
dancer writer painter poet artist critic editor author reader viewer
spring summer autumn winter season harvest planting growth bloom decay
north south east west corner center middle edge border region
happy glad joyful cheerful merry content pleased excited thrilled delighted
sad gloomy unhappy mournful tearful somber downcast dejected forlorn blue
angry mad furious irate annoyed cross irritated enraged livid resentful
calm quiet peaceful serene tranquil gentle mild still relaxed composed
fast slow rapid swift speedy brisk hasty sluggish gradual sudden
loud soft noisy silent hushed shrill faint muffled piercing booming
smart clever bright wise brilliant sharp keen astute shrewd gifted
dumb foolish silly absurd senseless mindless stupid inane fatuous obtuse
brave bold daring fearless valiant heroic gallant plucky intrepid gutsy
scared afraid fearful timid anxious nervous worried uneasy jumpy panicky
strong sturdy tough mighty powerful robust solid firm muscular hardy
weak frail feeble fragile flimsy brittle delicate faint puny slight
clean dirty tidy messy neat filthy spotless grimy dusty stained
wet dry damp moist soaked arid parched humid soggy crisp
tall short giant tiny small large huge vast immense compact
round square flat curved straight crooked bent angular oval narrow
deep shallow wide thin thick broad slim slender hollow dense
new ancient modern antique fresh stale recent vintage current dated
rich poor wealthy broke costly cheap lavish frugal spare ample
begin finish start end open close launch cease commence conclude
push pull lift drop carry throw catch toss grab release
climb crawl leap hop skip stride march stroll wander roam
laugh cry smile frown giggle chuckle sob weep grin smirk
sing hum whistle chant shout whisper murmur mutter yell scream
eat drink chew swallow sip gulp nibble bite taste devour
sleep wake dream nap doze rest snooze slumber rouse stir
teach learn study practice train coach tutor drill instruct educate
buy sell trade barter shop spend save invest earn owe
make build craft forge shape mold carve weld sculpt assemble
fix repair mend patch restore adjust tune service overhaul renovate
cook bake fry boil roast grill steam simmer toast stew
plant sow reap mow water weed prune graft mulch harvest
drive ride steer park brake coast cruise swerve reverse tow
fly soar glide hover flutter flap swoop dive circle drift
swim float paddle wade dive splash stroke surface plunge bob
think ponder muse reflect reason deduce infer surmise recall forget
speak utter state declare announce mention remark assert proclaim testify
ask inquire query question probe quiz demand request beg plead
answer reply respond retort counter acknowledge confirm deny refute admit
help aid assist support serve rescue relieve nurture foster comfort
hurt harm wound injure bruise damage impair afflict sting ache
win lose tie draw triumph prevail succeed fail falter stumble
play compete contest match tournament league score goal point champion
rule govern command direct manage oversee regulate preside reign administer
obey comply follow submit yield defer heed observe respect honor
horse sheep goat cattle rabbit mouse tiger lion bear wolf
eagle hawk owl robin sparrow crow swan goose duck hen
shark whale salmon trout tuna crab shrimp oyster squid eel
spider beetle moth cricket wasp hornet snail slug worm toad
ankle elbow wrist shoulder knee thigh spine skull jaw chin
finger thumb nail palm heel toe rib lung liver kidney
engine wheel gear axle piston clutch valve pump motor lever
signal wire cable switch socket plug fuse circuit battery antenna
planet comet meteor orbit galaxy nebula eclipse equator horizon latitude
island desert jungle prairie tundra glacier volcano canyon plateau marsh
castle palace temple chapel tower bridge tunnel harbor wharf pier
violin cello flute trumpet drum piano organ harp banjo oboe
"""


def word_list() -> list[str]:
    seen = []
    seen_set = set()
    for w in WORDS_RAW.split():
        lw = w.lower()
        if lw not in seen_set:
            seen.append(lw)
            seen_set.add(lw)
    assert len(seen) >= 1000, f"only {len(seen)} unique words authored"
    return seen[:1000]


def make_sentences(words: list[str], n: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    sentences = []
    for _ in range(n):
        length = rng.randint(5, 12)
        sentences.append(" ".join(rng.choice(words) for _ in range(length)))
    return sentences


def train_artifact(words: list[str]) -> Tokenizer:
    corpus = make_sentences(words, 20000, CORPUS_SEED)
    # guarantee every list word appears often in mid-sentence position
    for w in words:
        corpus.extend([f"the {w} one", f"a {w} thing", f"so {w} again"])

    tokenizer = Tokenizer(models.BPE())
    tokenizer.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    tokenizer.decoder = decoders.ByteLevel()
    trainer = trainers.BpeTrainer(
        vocab_size=VOCAB_SIZE,
        min_frequency=2,
        show_progress=False,
        initial_alphabet=pre_tokenizers.ByteLevel.alphabet(),
    )
    tokenizer.train_from_iterator(corpus, trainer)
    return tokenizer


def main() -> None:
    words = word_list()
    (DATA / "words_1k.txt").write_text("\n".join(words) + "\n", "utf-8")
    print(f"wrote words_1k.txt ({len(words)} words)")

    tokenizer = train_artifact(words)
    ARTIFACT_DIR.mkdir(parents=True, exist_ok=True)
    tokenizer.model.save(str(ARTIFACT_DIR))
    print(f"saved artifact to {ARTIFACT_DIR} (vocab size {tokenizer.get_vocab_size()})")

    probe = tokenizer.encode(" vertical").ids
    print(f"' vertical' -> {len(probe)} token(s): {probe}")
    assert len(probe) == 1, "training corpus failed to make ' vertical' a single token"

    golden = []
    for text in make_sentences(words, 1000, GOLDEN_SEED):
        golden.append({"text": text, "ids": tokenizer.encode(text).ids})
    out = FIXTURES / "golden_tokens.jsonl"
    out.write_text(
        "".join(json.dumps(rec) + "\n" for rec in golden), "utf-8"
    )
    print(f"wrote {out} ({len(golden)} sentences)")


if __name__ == "__main__":
    main()
