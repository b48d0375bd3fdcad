//! Published constants and sequences, kept verbatim (including line
//! continuations) as the single source for tests and the command line.
//! Decimal constants are leading digits: the true value begins with them.

/// Mills' constant `A`: `floor(A^(3^n))` is prime for every `n >= 1`.
pub const MILLS_A: &str = "1.3063778838630806904686144926";

/// Decimal digits of the 8th Mills prime.
pub const MILLS_EIGHTH_DIGITS: usize = 762;

/// Wright's `alpha`: `floor` of the tower `2^2^...^alpha` is prime.
pub const WRIGHT_ALPHA: &str = "1.9287800";

/// First three Wright primes.
pub const WRIGHT_PRIMES: [u64; 3] = [3, 13, 16381];

/// Decimal digits of the 4th Wright prime.
pub const WRIGHT_FOURTH_DIGITS: usize = 4932;

/// Printed leading digits of `a(0)` for `a(n+1) = a(n)^(5/4)`.
pub const POW54_A0_SHORT: &str = "43.8046877158";

/// Published rounded values of the 5/4 recurrence. They are not
/// consecutive terms of the orbit.
pub const POW54_PUBLISHED: [u64; 6] = [113, 367, 102217, 1827697, 67201679, 6084503671];

/// The long `a(0)` for the 5/4 recurrence, as printed: announced as 2600
/// digits, 2699 given. One line has 78 digits where its neighbours have 79.
pub const POW54_A0: &str = r"43. 8046877158029348185966456256908949508103708713749518407406132875267041950609\
3664963337107816445739567943558075746653930014636424735710790652072233219699229\
3264945523871320676837539601640703027906901627234335816037601910027530786667742\
4699462324971177019386074328699571966485110591669754207733416768610281388237076\
1457089916472910767210053536764714815683021515348888782413463002196590898912153\
7807818768276618328571083354683602327177557419282082356357338008605137724420625\
635595950708768409691378766548276776271408551872012425050013678129199364572781\
6813484896708864364878618010738012262326340551265300995594932556249327764325520\
8194746104359540189525699560278047888104384271808675933509955483655110570975535\
0785549077202528823776864085546060978256419523714505379764311017583547117340087\
4119475081308042239895607717353189481000696610499835674474037156885696125148581\
8456576179531740469553899959017477684394053845672138911212798487820145291551046\
7629440955925010855475725385626417446232721714485692213455756668913904742940022\
8509137974545537496866153147014899471237034869279337802008797927308327868037503\
8887734734110132599896243006668693634844327103981195681572642575883497205246107\
7249503005611993311614482718587460518670384095172358532168924929832717916742877\
5928083798545071506803190331910539166466084176778289275156307759698474412455449\
4235840260513685727576427182775664320370267582830712839903568563176995646262746\
1416682265277556094918638843788662398254929224611054007569004788919208610982286\
8199056832247214421586610021379123061307988471051671497283110156867428960680180\
5503966626145521465670913389257049550857812576171202023957487357339788493712676\
9426225000014887911004760565168355053802557466312278070529726060791106644597456\
7661803493305130350891168486525370221416972540649352435163491961811066911684870\
8294575729521396968670925609170964827383150968820007346616462008754667125912162\
9887393234505470764134731474624437303908697918037642878970154570903124414003971\
0357272367808690366664091433772132766429665349666355316481741675272445299039148\
2286893771949904585620265483705408090265640475448008548569022696419278537015273\
9052515666046613248284007441714998112109106552831729128554638499405603790836674\
4055864672832545083146225507711246656708938743897521843934561767824939322527151\
9446656406377385343422986304586480251980132774829846894886302934727512320855666\
7311057826570702055978747565264786935758838660918835790956716726895968781893980\
6197577089835533428250070076463861672738236689824429341266143008249630480529249\
5142244721354743123104963974936146293364440867656174513881761811216195861355409\
7226590982832455160532348892270853032526217953271203753936241844699444780852653\
926712756105661";

/// Seed of the base-10 concatenation example `a(n+1) = 10 a(n)`.
pub const CONCAT_A0: &str = "7.3327334517988679";

pub const CONCAT_PUBLISHED: [u64; 5] = [73, 733, 7333, 73327, 733273];

/// Scale constant `c` for `floor(c n^n)`, `n >= 3`.
pub const SCALED_NN_C: &str = "0.2655883729431433908971294536654661294389";

/// First `n` of the scaled sequence.
pub const SCALED_NN_START: u64 = 3;

/// `floor(c n^n)` for `n = 3 ..= 21`, all prime.
pub const SCALED_NN_PRIMES: [&str; 19] = [
    "7",
    "67",
    "829",
    "12391",
    "218723",
    "4455833",
    "102894377",
    "2655883729",
    "75775462379",
    "2368012611049",
    "80440106764817",
    "2951219812933057",
    "116299525867995629",
    "4899240744635092571",
    "219705395187452015923",
    "10449948501874965563651",
    "525445257345556693801913",
    "27848959374722952425334841",
    "1551723179991864497606172809",
];

/// Seed for `a(n+1) = a(n)^(3/2)`.
pub const POW32_A0: &str = "2.03823915478206876746349086260954825144862477844317361";

/// Rounded values of the 3/2 recurrence from index 0.
pub const POW32_PUBLISHED: [&str; 14] = [
    "2",
    "3",
    "5",
    "11",
    "37",
    "223",
    "3331",
    "192271",
    "84308429",
    "774116799347",
    "681098209317971743",
    "562101323304225290104514179",
    "13326678220145859782825116625722145759009",
    "1538448162271607869601834587431948506238982765193425993274489",
];

/// Exponent of the long-seed recurrence whose 50th prime is [`S50`].
pub const S50_EXPONENT: &str = "101/100";

/// `a(0) = 10^500 + S50_SEED_OFFSET + eps` with `0 < eps < 1/2`.
pub const S50_SEED_POWER: u32 = 500;
pub const S50_SEED_OFFSET: u32 = 961;

/// Decimal digits of [`S50`].
pub const S50_DIGITS: usize = 807;

/// The 50th prime of the 101/100 recurrence, as printed.
pub const S50: &str = r"129729528971426122166658259081315435974871367309456840812055525509563976052536464197\
821936120784492089449745630948278142648656401758919926499683620493424145145363861773\
044716845814540511418289754542689191694327904116242782241131052138054549585683795895\
226460529926493834263717492409387560259409231253958370245042303023794648019244182073\
576593618946511947995963350548413770285593359081097306798650486731513585054871329096\
194202981055877907668708729761964242992640744211230936407662435884639367683685800000\
716124853576007781499789743771269181463159253173337794440878414346193538514506034277\
502087533266305538298562224619861085522581430515597209416207494298867400378422593043\
260350351208262898632520628116793338057678207643439460644660886621181985756002255888\
259043523402372168932260997906477619348535003398763";
