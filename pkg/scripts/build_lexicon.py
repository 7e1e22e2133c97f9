#!/usr/bin/env python3
"""Regenerate src/bciui/data/lexicon.txt.

The bundled lexicon is a hand-written ARPAbet pronunciation table for a
core conversational vocabulary, expanded with regularly inflected forms
(noun plurals, verb -s/-ing/-ed) derived by standard English phonology:

    plural / 3sg:  sibilant-final -> +IH Z, voiceless-final -> +S, else +Z
    past tense:    T/D-final -> +IH D, voiceless-final -> +T, else +D
    progressive:   +IH NG

Irregular forms are listed explicitly in BASE. The output format is one
entry per line: lowercase word, TAB, space-separated uppercase phonemes.
"""

from __future__ import annotations

import sys
from pathlib import Path

ARPABET = {
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH", "EH", "ER",
    "EY", "F", "G", "HH", "IH", "IY", "JH", "K", "L", "M", "N", "NG", "OW",
    "OY", "P", "R", "S", "SH", "T", "TH", "UH", "UW", "V", "W", "Y", "Z",
    "ZH",
}

SIBILANTS = {"S", "Z", "SH", "ZH", "CH", "JH"}
VOICELESS = {"P", "T", "K", "F", "TH", "S", "SH", "CH", "HH"}

# Base table: function words, irregular forms, and words we do not inflect.
BASE = """
a AH
an AE N
the DH AH
and AE N D
or AO R
but B AH T
if IH F
then DH EH N
than DH AE N
because B IH K AO Z
so S OW
not N AA T
no N OW
yes Y EH S
okay OW K EY
i AY
me M IY
my M AY
mine M AY N
you Y UW
your Y AO R
yours Y AO R Z
he HH IY
him HH IH M
his HH IH Z
she SH IY
her HH ER
hers HH ER Z
it IH T
its IH T S
we W IY
us AH S
our AW ER
ours AW ER Z
they DH EY
them DH EH M
their DH EH R
theirs DH EH R Z
this DH IH S
that DH AE T
these DH IY Z
those DH OW Z
who HH UW
whom HH UW M
whose HH UW Z
what W AH T
which W IH CH
when W EH N
where W EH R
why W AY
how HH AW
here HH IY R
there DH EH R
all AO L
any EH N IY
both B OW TH
each IY CH
few F Y UW
more M AO R
most M OW S T
some S AH M
such S AH CH
only OW N L IY
own OW N
same S EY M
other AH DH ER
another AH N AH DH ER
much M AH CH
many M EH N IY
very V EH R IY
too T UW
also AO L S OW
just JH AH S T
now N AW
soon S UW N
later L EY T ER
always AO L W EY Z
never N EH V ER
often AO F AH N
sometimes S AH M T AY M Z
again AH G EH N
still S T IH L
already AO L R EH D IY
yet Y EH T
about AH B AW T
above AH B AH V
after AE F T ER
before B IH F AO R
against AH G EH N S T
at AE T
by B AY
down D AW N
up AH P
for F AO R
from F R AH M
in IH N
into IH N T UW
of AH V
off AO F
on AA N
out AW T
over OW V ER
under AH N D ER
through TH R UW
to T UW
with W IH DH
without W IH DH AW T
between B IH T W IY N
near N IY R
around ER AW N D
behind B IH HH AY N D
inside IH N S AY D
outside AW T S AY D
am AE M
is IH Z
are AA R
was W AH Z
were W ER
be B IY
been B IH N
being B IY IH NG
do D UW
does D AH Z
did D IH D
done D AH N
doing D UW IH NG
have HH AE V
has HH AE Z
had HH AE D
having HH AE V IH NG
will W IH L
would W UH D
can K AE N
could K UH D
shall SH AE L
should SH UH D
may M EY
might M AY T
must M AH S T
cannot K AE N AA T
hello HH AH L OW
hi HH AY
hey HH EY
goodbye G UH D B AY
bye B AY
please P L IY Z
thanks TH AE NG K S
thank TH AE NG K
welcome W EH L K AH M
sorry S AA R IY
excuse IH K S K Y UW Z
pardon P AA R D AH N
sure SH UH R
maybe M EY B IY
right R AY T
wrong R AO NG
fine F AY N
great G R EY T
good G UH D
bad B AE D
well W EH L
oh OW
wow W AW
morning M AO R N IH NG
afternoon AE F T ER N UW N
evening IY V N IH NG
night N AY T
today T AH D EY
tomorrow T AH M AA R OW
yesterday Y EH S T ER D EY
tonight T AH N AY T
went W EH N T
gone G AO N
came K EY M
got G AA T
made M EY D
knew N UW
known N OW N
thought TH AO T
took T UH K
taken T EY K AH N
saw S AO
seen S IY N
gave G EY V
given G IH V AH N
found F AW N D
told T OW L D
felt F EH L T
tried T R AY D
left L EH F T
kept K EH P T
began B IH G AE N
begun B IH G AH N
shown SH OW N
heard HH ER D
ran R AE N
held HH EH L D
brought B R AO T
wrote R OW T
written R IH T AH N
sat S AE T
stood S T UH D
lost L AO S T
paid P EY D
met M EH T
understood AH N D ER S T UH D
stopped S T AA P T
spoke S P OW K
spoken S P OW K AH N
spent S P EH N T
grew G R UW
grown G R OW N
won W AH N
bought B AO T
sent S EH N T
built B IH L T
fell F EH L
fallen F AO L AH N
sold S OW L D
broke B R OW K
broken B R OW K AH N
ate EY T
eaten IY T AH N
drank D R AE NG K
caught K AO T
drew D R UW
drawn D R AO N
chose CH OW Z
chosen CH OW Z AH N
slept S L EH P T
woke W OW K
said S EH D
says S EH Z
meant M EH N T
drove D R OW V
driven D R IH V AH N
rode R OW D
flew F L UW
flown F L OW N
sang S AE NG
sung S AH NG
people P IY P AH L
men M EH N
women W IH M AH N
children CH IH L D R AH N
feet F IY T
time T AY M
year Y IY R
day D EY
week W IY K
month M AH N TH
hour AW ER
minute M IH N AH T
second S EH K AH N D
person P ER S AH N
man M AE N
woman W UH M AH N
child CH AY L D
family F AE M AH L IY
friend F R EH N D
wife W AY F
husband HH AH Z B AH N D
mother M AH DH ER
father F AA DH ER
mom M AA M
dad D AE D
son S AH N
daughter D AO T ER
brother B R AH DH ER
sister S IH S T ER
baby B EY B IY
doctor D AA K T ER
nurse N ER S
teacher T IY CH ER
world W ER L D
life L AY F
hand HH AE N D
eye AY
head HH EH D
face F EY S
arm AA R M
leg L EH G
foot F UH T
finger F IH NG G ER
mouth M AW TH
ear IY R
nose N OW Z
hair HH EH R
back B AE K
body B AA D IY
heart HH AA R T
voice V OY S
breath B R EH TH
place P L EY S
room R UW M
house HH AW S
home HH OW M
door D AO R
window W IH N D OW
wall W AO L
floor F L AO R
bed B EH D
chair CH EH R
wheelchair W IY L CH EH R
table T EY B AH L
desk D EH S K
kitchen K IH CH AH N
bathroom B AE TH R UW M
bedroom B EH D R UW M
garden G AA R D AH N
yard Y AA R D
car K AA R
bus B AH S
train T R EY N
street S T R IY T
road R OW D
city S IH T IY
town T AW N
country K AH N T R IY
school S K UW L
office AO F AH S
hospital HH AA S P IH T AH L
store S T AO R
shop SH AA P
job JH AA B
money M AH N IY
dollar D AA L ER
food F UW D
water W AO T ER
coffee K AO F IY
tea T IY
juice JH UW S
milk M IH L K
bread B R EH D
cheese CH IY Z
egg EH G
meat M IY T
chicken CH IH K AH N
fish F IH SH
fruit F R UW T
apple AE P AH L
orange AO R AH N JH
banana B AH N AE N AH
vegetable V EH JH T AH B AH L
salad S AE L AH D
soup S UW P
rice R AY S
pasta P AA S T AH
pizza P IY T S AH
dinner D IH N ER
lunch L AH N CH
breakfast B R EH K F AH S T
snack S N AE K
meal M IY L
plate P L EY T
cup K AH P
glass G L AE S
bottle B AA T AH L
phone F OW N
computer K AH M P Y UW T ER
laptop L AE P T AA P
tablet T AE B L AH T
screen S K R IY N
monitor M AA N AH T ER
keyboard K IY B AO R D
mouse M AW S
button B AH T AH N
cursor K ER S ER
pointer P OY N T ER
internet IH N T ER N EH T
website W EH B S AY T
video V IH D IY OW
movie M UW V IY
music M Y UW Z IH K
song S AO NG
game G EY M
news N UW Z
book B UH K
story S T AO R IY
letter L EH T ER
word W ER D
sentence S EH N T AH N S
message M EH S AH JH
question K W EH S CH AH N
idea AY D IY AH
thing TH IH NG
something S AH M TH IH NG
anything EH N IY TH IH NG
nothing N AH TH IH NG
everything EH V R IY TH IH NG
someone S AH M W AH N
anyone EH N IY W AH N
everyone EH V R IY W AH N
nobody N OW B AH D IY
way W EY
name N EY M
number N AH M B ER
part P AA R T
problem P R AA B L AH M
light L AY T
lamp L AE M P
television T EH L AH V IH ZH AH N
radio R EY D IY OW
fan F AE N
air EH R
heat HH IY T
weather W EH DH ER
rain R EY N
snow S N OW
sun S AH N
wind W IH N D
cloud K L AW D
sky S K AY
tree T R IY
flower F L AW ER
grass G R AE S
bird B ER D
dog D AO G
cat K AE T
pet P EH T
medicine M EH D AH S AH N
pill P IH L
dream D R IY M
shower SH AW ER
bath B AE TH
towel T AW AH L
soap S OW P
shirt SH ER T
pants P AE N T S
shoe SH UW
sock S AA K
coat K OW T
hat HH AE T
glasses G L AE S IH Z
blanket B L AE NG K AH T
pillow P IH L OW
clock K L AA K
key K IY
wallet W AO L AH T
bag B AE G
box B AA K S
paper P EY P ER
pen P EH N
pencil P EH N S AH L
weekend W IY K EH N D
birthday B ER TH D EY
party P AA R T IY
gift G IH F T
card K AA R D
picture P IH K CH ER
photo F OW T OW
camera K AE M ER AH
care K EH R
partner P AA R T N ER
appointment AH P OY N T M AH N T
therapy TH EH R AH P IY
exercise EH K S ER S AY Z
trip T R IH P
vacation V EY K EY SH AH N
beach B IY CH
park P AA R K
church CH ER CH
team T IY M
sport S P AO R T
football F UH T B AO L
baseball B EY S B AO L
basketball B AE S K AH T B AO L
golf G AA L F
race R EY S
winner W IH N ER
score S K AO R
new N UW
old OW L D
young Y AH NG
big B IH G
small S M AO L
little L IH T AH L
large L AA R JH
long L AO NG
short SH AO R T
high HH AY
low L OW
hot HH AA T
cold K OW L D
warm W AO R M
cool K UW L
easy IY Z IY
hard HH AA R D
difficult D IH F AH K AH L T
simple S IH M P AH L
fast F AE S T
slow S L OW
early ER L IY
late L EY T
happy HH AE P IY
sad S AE D
angry AE NG G R IY
tired T AY ER D
hungry HH AH NG G R IY
thirsty TH ER S T IY
sick S IH K
healthy HH EH L TH IY
strong S T R AO NG
weak W IY K
comfortable K AH M F T ER B AH L
ready R EH D IY
busy B IH Z IY
free F R IY
full F UH L
empty EH M P T IY
dirty D ER T IY
quiet K W AY AH T
loud L AW D
bright B R AY T
dark D AA R K
beautiful B Y UW T AH F AH L
nice N AY S
kind K AY N D
funny F AH N IY
important IH M P AO R T AH N T
different D IH F ER AH N T
favorite F EY V ER AH T
special S P EH SH AH L
real R IY L
true T R UW
false F AO L S
closed K L OW Z D
next N EH K S T
last L AE S T
first F ER S T
third TH ER D
best B EH S T
better B EH T ER
worse W ER S
worst W ER S T
red R EH D
blue B L UW
green G R IY N
yellow Y EH L OW
black B L AE K
white W AY T
brown B R AW N
pink P IH NG K
purple P ER P AH L
gray G R EY
one W AH N
two T UW
three TH R IY
four F AO R
five F AY V
six S IH K S
seven S EH V AH N
eight EY T
nine N AY N
ten T EH N
eleven IH L EH V AH N
twelve T W EH L V
twenty T W EH N T IY
thirty TH ER T IY
forty F AO R T IY
fifty F IH F T IY
hundred HH AH N D R AH D
thousand TH AW Z AH N D
half HH AE F
quarter K W AO R T ER
monday M AH N D EY
tuesday T UW Z D EY
wednesday W EH N Z D EY
thursday TH ER Z D EY
friday F R AY D EY
saturday S AE T ER D EY
sunday S AH N D EY
january JH AE N Y UW EH R IY
february F EH B Y UW EH R IY
march M AA R CH
april EY P R AH L
june JH UW N
july JH UW L AY
august AO G AH S T
september S EH P T EH M B ER
october AA K T OW B ER
november N OW V EH M B ER
december D IH S EH M B ER
spring S P R IH NG
summer S AH M ER
winter W IH N T ER
season S IY Z AH N
go G OW
goes G OW Z
going G OW IH NG
come K AH M
comes K AH M Z
coming K AH M IH NG
get G EH T
gets G EH T S
getting G EH T IH NG
make M EY K
makes M EY K S
making M EY K IH NG
know N OW
knows N OW Z
knowing N OW IH NG
think TH IH NG K
thinks TH IH NG K S
thinking TH IH NG K IH NG
take T EY K
takes T EY K S
taking T EY K IH NG
see S IY
sees S IY Z
seeing S IY IH NG
give G IH V
gives G IH V Z
giving G IH V IH NG
find F AY N D
finds F AY N D Z
finding F AY N D IH NG
tell T EH L
tells T EH L Z
telling T EH L IH NG
keep K IY P
keeps K IY P S
keeping K IY P IH NG
let L EH T
lets L EH T S
letting L EH T IH NG
begin B IH G IH N
begins B IH G IH N Z
beginning B IH G IH N IH NG
hear HH IY R
hears HH IY R Z
hearing HH IY R IH NG
run R AH N
runs R AH N Z
running R AH N IH NG
hold HH OW L D
holds HH OW L D Z
holding HH OW L D IH NG
bring B R IH NG
brings B R IH NG Z
bringing B R IH NG IH NG
write R AY T
writes R AY T S
writing R AY T IH NG
sit S IH T
sits S IH T S
sitting S IH T IH NG
stand S T AE N D
stands S T AE N D Z
standing S T AE N D IH NG
lose L UW Z
loses L UW Z IH Z
losing L UW Z IH NG
pay P EY
pays P EY Z
paying P EY IH NG
meet M IY T
meets M IY T S
meeting M IY T IH NG
set S EH T
sets S EH T S
setting S EH T IH NG
lead L IY D
leads L IY D Z
leading L IY D IH NG
led L EH D
understand AH N D ER S T AE N D
understands AH N D ER S T AE N D Z
understanding AH N D ER S T AE N D IH NG
speak S P IY K
speaks S P IY K S
speaking S P IY K IH NG
read R IY D
reads R IY D Z
reading R IY D IH NG
spend S P EH N D
spends S P EH N D Z
spending S P EH N D IH NG
grow G R OW
grows G R OW Z
growing G R OW IH NG
win W IH N
wins W IH N Z
winning W IH N IH NG
buy B AY
buys B AY Z
buying B AY IH NG
send S EH N D
sends S EH N D Z
sending S EH N D IH NG
build B IH L D
builds B IH L D Z
building B IH L D IH NG
fall F AO L
falls F AO L Z
falling F AO L IH NG
cut K AH T
cuts K AH T S
cutting K AH T IH NG
sell S EH L
sells S EH L Z
selling S EH L IH NG
break B R EY K
breaks B R EY K S
breaking B R EY K IH NG
eat IY T
eats IY T S
eating IY T IH NG
drink D R IH NG K
drinks D R IH NG K S
drinking D R IH NG K IH NG
catch K AE CH
catches K AE CH IH Z
catching K AE CH IH NG
draw D R AO
draws D R AO Z
drawing D R AO IH NG
choose CH UW Z
chooses CH UW Z IH Z
choosing CH UW Z IH NG
sleep S L IY P
sleeps S L IY P S
sleeping S L IY P IH NG
wake W EY K
wakes W EY K S
waking W EY K IH NG
say S EY
saying S EY IH NG
mean M IY N
means M IY N Z
meaning M IY N IH NG
drive D R AY V
drives D R AY V Z
driving D R AY V IH NG
ride R AY D
rides R AY D Z
riding R AY D IH NG
fly F L AY
flies F L AY Z
flying F L AY IH NG
swim S W IH M
swims S W IH M Z
swimming S W IH M IH NG
swam S W AE M
sing S IH NG
sings S IH NG Z
singing S IH NG IH NG
put P UH T
puts P UH T S
putting P UH T IH NG
volume V AA L Y UW M
remote R IH M OW T
sleepy S L IY P IY
sunny S AH N IY
hurt HH ER T
hurts HH ER T S
"""

# Regular verbs: base pronunciation; -s/-ing/-ed derived.
REGULAR_VERBS = """
want W AA N T
need N IY D
use Y UW Z
ask AE S K
work W ER K
seem S IY M
feel F IY L
call K AO L
play P L EY
move M UW V
like L AY K
live L IH V
believe B IH L IY V
happen HH AE P AH N
include IH N K L UW D
learn L ER N
change CH EY N JH
watch W AA CH
follow F AA L OW
stop S T AA P
create K R IY EY T
open OW P AH N
walk W AO K
offer AO F ER
remember R IH M EH M B ER
love L AH V
consider K AH N S IH D ER
appear AH P IY R
wait W EY T
serve S ER V
expect IH K S P EH K T
stay S T EY
reach R IY CH
remain R IH M EY N
suggest S AH G JH EH S T
raise R EY Z
pass P AE S
require R IH K W AY R
report R IH P AO R T
decide D IH S AY D
pull P UH L
push P UH SH
return R IH T ER N
explain IH K S P L EY N
hope HH OW P
develop D IH V EH L AH P
carry K AE R IY
receive R IH S IY V
agree AH G R IY
support S AH P AO R T
produce P R AH D UW S
cover K AH V ER
turn T ER N
start S T AA R T
help HH EH L P
talk T AO K
look L UH K
answer AE N S ER
check CH EH K
close K L OW Z
save S EY V
share SH EH R
type T AY P
click K L IH K
scroll S K R OW L
select S AH L EH K T
delete D IH L IY T
add AE D
remove R IH M UW V
insert IH N S ER T
refresh R IH F R EH SH
correct K ER EH K T
rate R EY T
calibrate K AE L AH B R EY T
adjust AH JH AH S T
switch S W IH CH
toggle T AA G AH L
connect K AH N EH K T
browse B R AW Z
search S ER CH
email IY M EY L
text T EH K S T
visit V IH Z AH T
listen L IH S AH N
cook K UH K
clean K L IY N
wash W AA SH
dance D AE N S
paint P EY N T
smile S M AY L
laugh L AE F
cry K R AY
rest R EH S T
relax R IH L AE K S
breathe B R IY DH
stretch S T R EH CH
lift L IH F T
lower L OW ER
nod N AA D
blink B L IH NG K
point P OY N T
wave W EY V
press P R EH S
release R IH L IY S
show SH OW
try T R AY
enjoy EH N JH OY
worry W ER IY
"""

# Nouns we pluralize (base pronunciation only; plural derived).
PLURAL_NOUNS = """
year day week month hour minute second friend wife daughter sister brother
doctor nurse teacher hand eye head face arm leg finger ear room house door
window wall floor bed chair table desk car bus train street road city town
school office hospital store shop job dollar egg apple orange banana salad
soup plate cup glass bottle phone computer laptop tablet screen monitor
keyboard button cursor pointer website video movie song game book story
letter word sentence message question idea thing way name number part
problem light lamp fan cloud tree flower bird dog cat pet pill shower towel
shirt shoe sock coat hat blanket pillow clock key wallet bag box paper pen
pencil weekend birthday party gift card picture photo camera partner
appointment trip beach park church team sport race winner score meal snack
place voice
"""

# Irregular spellings for derived forms: word -> spelled form.
SPELL_OVERRIDES = {
    ("stop", "ing"): "stopping",
    ("stop", "ed"): "stopped",
    ("nod", "ing"): "nodding",
    ("nod", "ed"): "nodded",
}

# Verbs whose -ed/-s/-ing forms are irregular and already in BASE.
SKIP_FORMS = {
    ("show", "ed"),  # showed is regular, shown is in BASE; keep showed too
    ("stop", "ed"),  # stopped listed in BASE
}


def parse_table(text: str) -> dict[str, tuple[str, ...]]:
    table: dict[str, tuple[str, ...]] = {}
    for line in text.strip().splitlines():
        parts = line.split()
        word, phones = parts[0], tuple(parts[1:])
        bad = [p for p in phones if p not in ARPABET]
        if bad:
            raise SystemExit(f"{word}: unknown phonemes {bad}")
        if word in table and table[word] != phones:
            raise SystemExit(f"{word}: conflicting pronunciations")
        table[word] = phones
    return table


def suffix_s(phones: tuple[str, ...]) -> tuple[str, ...]:
    last = phones[-1]
    if last in SIBILANTS:
        return phones + ("IH", "Z")
    if last in VOICELESS:
        return phones + ("S",)
    return phones + ("Z",)


def suffix_ed(phones: tuple[str, ...]) -> tuple[str, ...]:
    last = phones[-1]
    if last in {"T", "D"}:
        return phones + ("IH", "D")
    if last in VOICELESS:
        return phones + ("T",)
    return phones + ("D",)


def spell_s(word: str) -> str:
    if word.endswith("y") and len(word) > 1 and word[-2] not in "aeiou":
        return word[:-1] + "ies"
    if word.endswith(("s", "x", "z", "ch", "sh")):
        return word + "es"
    return word + "s"


def spell_ed(word: str) -> str:
    if (word, "ed") in SPELL_OVERRIDES:
        return SPELL_OVERRIDES[(word, "ed")]
    if word.endswith("e"):
        return word + "d"
    if word.endswith("y") and len(word) > 1 and word[-2] not in "aeiou":
        return word[:-1] + "ied"
    return word + "ed"


def spell_ing(word: str) -> str:
    if (word, "ing") in SPELL_OVERRIDES:
        return SPELL_OVERRIDES[(word, "ing")]
    if word.endswith("e") and not word.endswith(("ee", "ye")):
        return word[:-1] + "ing"
    return word + "ing"


def build() -> dict[str, tuple[str, ...]]:
    lexicon = parse_table(BASE)
    verbs = parse_table(REGULAR_VERBS)
    plural_nouns = PLURAL_NOUNS.split()

    for word, phones in verbs.items():
        lexicon.setdefault(word, phones)
        lexicon.setdefault(spell_s(word), suffix_s(phones))
        lexicon.setdefault(spell_ing(word), phones + ("IH", "NG"))
        if (word, "ed") not in SKIP_FORMS:
            lexicon.setdefault(spell_ed(word), suffix_ed(phones))

    for word in plural_nouns:
        if word not in lexicon:
            raise SystemExit(f"plural noun {word!r} missing a base entry")
        lexicon.setdefault(spell_s(word), suffix_s(lexicon[word]))

    return lexicon


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent / "src" / "bciui" / "data" / "lexicon.txt"
    )
    lexicon = build()
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        for word in sorted(lexicon):
            fh.write(f"{word}\t{' '.join(lexicon[word])}\n")
    print(f"wrote {len(lexicon)} entries to {out}")


if __name__ == "__main__":
    main()
