//! Built-in product vocabulary shared by the simulator's catalog builder and
//! the refiner's default lexicon, plus the default category taxonomy.
//!
//! Raw titles are assembled from these tables with marketing noise; the
//! refiner only knows the canonical cores, modifiers and brands.

use crate::sim::types::Platform;

pub struct ModifierSpec {
    pub canonical: &'static str,
    /// Lower sorts first when more than three modifiers compete.
    pub priority: u8,
    /// Audience descriptors survive only on audience-relevant products.
    pub audience: bool,
    pub aliases: &'static [&'static str],
}

const fn m(
    canonical: &'static str,
    priority: u8,
    aliases: &'static [&'static str],
) -> ModifierSpec {
    ModifierSpec {
        canonical,
        priority,
        audience: false,
        aliases,
    }
}

const fn aud(canonical: &'static str, aliases: &'static [&'static str]) -> ModifierSpec {
    ModifierSpec {
        canonical,
        priority: 1,
        audience: true,
        aliases,
    }
}

pub const MODIFIERS: &[ModifierSpec] = &[
    aud("Women's", &["women's", "for women", "women", "ladies"]),
    aud("Men's", &["men's", "for men", "men"]),
    m("slim-fit", 2, &["slim-fit", "slim fit"]),
    m("oversized", 2, &["oversized", "loose fit"]),
    m("high-waist", 2, &["high-waist", "high waisted"]),
    m("straight-leg", 2, &["straight-leg", "straight leg"]),
    m("A-line", 2, &["a-line"]),
    m("short", 3, &["short style", "short"]),
    m("long", 3, &["long style", "long"]),
    m("midi", 3, &["midi length", "midi"]),
    m("hooded", 3, &["hooded", "with hood"]),
    m("floral", 4, &["floral print", "floral"]),
    m("cashmere", 4, &["cashmere blend", "cashmere"]),
    m("cotton", 4, &["pure cotton", "cotton"]),
    m("stretch", 5, &["stretch", "elastic"]),
    m("lightweight", 5, &["lightweight", "ultra light"]),
    m("breathable", 4, &["breathable", "mesh breathable"]),
    m("cushioned", 4, &["cushioned", "shock absorbing"]),
    m("mid-sleeve", 6, &["mid-sleeve", "mid sleeve"]),
    m("white-duck-down", 4, &["white-duck-down", "white duck down"]),
    m("high-calcium", 3, &["high-calcium", "high calcium", "calcium"]),
    m("high-iron", 3, &["high-iron", "high iron", "iron"]),
    m("full-fat", 5, &["full-fat", "whole milk"]),
    m("hydrating", 3, &["hydrating", "moisturizing"]),
    m("anti-wrinkle", 3, &["anti-wrinkle", "anti aging"]),
    m("sensitive-skin", 4, &["sensitive-skin", "sensitive skin"]),
    m("matte", 3, &["matte", "velvet matte"]),
    m("long-lasting", 4, &["long-lasting", "long lasting"]),
    m("SPF50", 3, &["spf50", "spf 50"]),
    m("waterproof", 4, &["waterproof", "water resistant"]),
    m("noise-cancelling", 3, &["noise-cancelling", "active noise cancelling", "anc"]),
    m("long-battery", 4, &["long-battery", "long battery life"]),
    m("5G", 3, &["5g"]),
    m("256GB", 3, &["256gb"]),
    m("16-inch", 3, &["16-inch", "16 inch"]),
    m("20000mAh", 3, &["20000mah"]),
    m("fast-charging", 4, &["fast-charging", "fast charge", "quick charge"]),
    m("fragrant", 3, &["fragrant", "aromatic"]),
    m("cold-pressed", 3, &["cold-pressed", "cold pressed"]),
    m("dark-roast", 3, &["dark-roast", "dark roast"]),
    m("arabica", 4, &["arabica"]),
    m("LED", 3, &["led"]),
    m("eye-care", 3, &["eye-care", "eye care", "eye protection"]),
    m("dimmable", 4, &["dimmable", "stepless dimming"]),
    m("4-piece", 3, &["4-piece", "four piece"]),
    m("foldable", 3, &["foldable", "collapsible"]),
    m("postgraduate", 3, &["postgraduate", "graduate entrance"]),
    m("civil-service", 3, &["civil-service", "civil service"]),
    m("bestselling", 5, &["bestselling", "best seller"]),
    m("hardcover", 4, &["hardcover", "hard cover"]),
    m("non-slip", 3, &["non-slip", "anti slip"]),
    m("40L", 3, &["40l"]),
    m("2-person", 3, &["2-person", "two person"]),
    m("grain-free", 3, &["grain-free", "grain free"]),
    m("retractable", 3, &["retractable"]),
    m("upper-arm", 3, &["upper-arm", "upper arm"]),
    m("automatic", 4, &["automatic", "fully automatic"]),
    m("unscented", 3, &["unscented", "fragrance free"]),
    m("ultra-thin", 3, &["ultra-thin", "ultra thin"]),
    m("anti-colic", 3, &["anti-colic", "anti colic"]),
    m("organic", 3, &["organic"]),
    m("A2-protein", 3, &["a2-protein", "a2 protein"]),
    m("folic-acid", 3, &["folic-acid", "folic acid"]),
    m("U-shaped", 3, &["u-shaped", "u shaped"]),
    m("bilingual", 3, &["bilingual", "chinese english"]),
    m("STEM", 3, &["stem"]),
    m("large-cup", 4, &["large-cup", "large cup"]),
    m("less-sugar", 4, &["less-sugar", "less sugar", "half sugar"]),
    m("spicy", 4, &["spicy", "extra spicy"]),
    m("Ocean View", 5, &["ocean view", "sea view"]),
    m("Garden View", 5, &["garden view"]),
    m("City View", 5, &["city view"]),
    m("Lake View", 5, &["lake view"]),
];

pub const BRANDS: &[&str] = &[
    "Bright Dairy",
    "Feihe",
    "Junlebao",
    "Uniqlo",
    "Semir",
    "Anta",
    "Li-Ning",
    "Proya",
    "Perfect Diary",
    "Xiaomi",
    "Huawei",
    "Anker",
    "Lenovo",
    "Arawana",
    "Three Squirrels",
    "Opple",
    "Deli",
    "Decathlon",
    "Royal Canin",
    "Omron",
    "Pampers",
    "Babycare",
    "Pigeon",
    "Elevit",
    "LEGO",
    "SCHAGEE",
    "Starbucks",
    "HEYTEA",
    "Laoxiang Chicken",
    "Wallace",
];

pub struct ProductSpec {
    pub category: &'static str,
    pub platform: Platform,
    pub core: &'static str,
    /// Spellings used in raw titles; the canonical core is always accepted too.
    pub aliases: &'static [&'static str],
    pub modifiers: &'static [&'static str],
    pub brands: &'static [&'static str],
    /// Audience descriptors are part of the product's identity (apparel).
    pub audience_core: bool,
    pub formula_stage: Option<u8>,
}

const fn p(
    category: &'static str,
    core: &'static str,
    aliases: &'static [&'static str],
    modifiers: &'static [&'static str],
    brands: &'static [&'static str],
) -> ProductSpec {
    ProductSpec {
        category,
        platform: Platform::ECommerce,
        core,
        aliases,
        modifiers,
        brands,
        audience_core: false,
        formula_stage: None,
    }
}

const fn apparel(
    core: &'static str,
    aliases: &'static [&'static str],
    modifiers: &'static [&'static str],
    brands: &'static [&'static str],
) -> ProductSpec {
    ProductSpec {
        category: "apparel",
        platform: Platform::ECommerce,
        core,
        aliases,
        modifiers,
        brands,
        audience_core: true,
        formula_stage: None,
    }
}

const fn formula(core: &'static str, aliases: &'static [&'static str], stage: u8) -> ProductSpec {
    ProductSpec {
        category: "baby-formula",
        platform: Platform::ECommerce,
        core,
        aliases,
        modifiers: &["organic", "A2-protein"],
        brands: &["Feihe", "Junlebao"],
        audience_core: false,
        formula_stage: Some(stage),
    }
}

const fn delivery(
    category: &'static str,
    core: &'static str,
    modifiers: &'static [&'static str],
    brands: &'static [&'static str],
) -> ProductSpec {
    ProductSpec {
        category,
        platform: Platform::Delivery,
        core,
        aliases: &[],
        modifiers,
        brands,
        audience_core: false,
        formula_stage: None,
    }
}

pub const PRODUCTS: &[ProductSpec] = &[
    apparel(
        "knit top",
        &["knit sweater", "knitted jumper"],
        &["Women's", "slim-fit", "short", "mid-sleeve", "cashmere", "oversized"],
        &["Uniqlo", "Semir"],
    ),
    apparel(
        "down jacket",
        &["puffer coat"],
        &["Women's", "Men's", "long", "hooded", "lightweight", "white-duck-down"],
        &["Semir", "Uniqlo"],
    ),
    apparel(
        "jeans",
        &["denim jeans", "denim trousers"],
        &["Women's", "Men's", "high-waist", "straight-leg", "stretch"],
        &["Semir", "Uniqlo"],
    ),
    apparel(
        "dress",
        &["one-piece dress"],
        &["Women's", "floral", "A-line", "midi", "cotton"],
        &["Semir"],
    ),
    apparel(
        "running shoes",
        &["jogging sneakers"],
        &["Women's", "Men's", "breathable", "cushioned", "lightweight"],
        &["Anta", "Li-Ning"],
    ),
    p(
        "beauty",
        "face cream",
        &["moisturizing face cream", "facial cream"],
        &["hydrating", "anti-wrinkle", "sensitive-skin"],
        &["Proya"],
    ),
    p("beauty", "lipstick", &["lip stick"], &["matte", "long-lasting"], &["Perfect Diary"]),
    p("beauty", "sunscreen", &["sun cream", "sunblock"], &["SPF50", "waterproof"], &["Proya"]),
    p(
        "electronics",
        "wireless earbuds",
        &["bluetooth earphones", "true wireless headset"],
        &["noise-cancelling", "long-battery"],
        &["Xiaomi", "Huawei"],
    ),
    p("electronics", "smartphone", &["mobile phone"], &["5G", "256GB"], &["Xiaomi", "Huawei"]),
    p(
        "electronics",
        "laptop",
        &["notebook computer"],
        &["16-inch", "lightweight"],
        &["Lenovo", "Huawei"],
    ),
    p(
        "electronics",
        "power bank",
        &["portable charger"],
        &["20000mAh", "fast-charging"],
        &["Anker", "Xiaomi"],
    ),
    p(
        "groceries",
        "milk powder",
        &["adult milk powder"],
        &["full-fat", "high-calcium", "high-iron"],
        &["Bright Dairy"],
    ),
    p("groceries", "rice", &["northeast rice"], &["fragrant"], &["Arawana"]),
    p("groceries", "cooking oil", &["peanut oil"], &["cold-pressed"], &["Arawana"]),
    p(
        "groceries",
        "coffee beans",
        &["roasted coffee beans"],
        &["dark-roast", "arabica"],
        &["Three Squirrels"],
    ),
    p(
        "home",
        "desk lamp",
        &["reading lamp", "table lamp"],
        &["LED", "eye-care", "dimmable"],
        &["Opple"],
    ),
    p("home", "bedding set", &["duvet cover set"], &["4-piece", "cotton"], &[]),
    p("home", "storage box", &["storage bin"], &["foldable"], &["Deli"]),
    p(
        "books-study",
        "exam prep book",
        &["test prep workbook"],
        &["postgraduate", "civil-service"],
        &[],
    ),
    p("books-study", "novel", &["fiction book"], &["bestselling", "hardcover"], &[]),
    p("outdoor-sports", "yoga mat", &["fitness mat"], &["non-slip"], &["Decathlon"]),
    p(
        "outdoor-sports",
        "hiking backpack",
        &["mountaineering bag"],
        &["40L", "waterproof"],
        &["Decathlon"],
    ),
    p(
        "outdoor-sports",
        "camping tent",
        &["outdoor tent"],
        &["2-person", "waterproof"],
        &["Decathlon"],
    ),
    p("pets", "cat food", &["cat kibble"], &["grain-free"], &["Royal Canin"]),
    p("pets", "dog leash", &["dog lead"], &["retractable"], &[]),
    p(
        "health",
        "blood pressure monitor",
        &["sphygmomanometer"],
        &["upper-arm", "automatic"],
        &["Omron"],
    ),
    p("baby-care", "wet wipes", &["baby wipes"], &["unscented"], &["Babycare", "Pigeon"]),
    p("baby-care", "diapers", &["nappies"], &["ultra-thin"], &["Pampers", "Babycare"]),
    p("baby-care", "baby bottle", &["feeding bottle"], &["anti-colic"], &["Pigeon"]),
    formula("stage-1 formula", &["stage 1 infant formula milk powder"], 1),
    formula("stage-2 formula", &["stage 2 follow-on formula milk powder"], 2),
    formula("stage-3 formula", &["stage 3 growing-up formula milk powder"], 3),
    p("maternity", "prenatal vitamins", &["pregnancy multivitamin"], &["folic-acid"], &["Elevit"]),
    p("maternity", "pregnancy pillow", &["maternity body pillow"], &["U-shaped"], &[]),
    p(
        "kids-education",
        "picture book",
        &["children's picture book"],
        &["bilingual"],
        &[],
    ),
    p("kids-education", "building blocks", &["building block set"], &["STEM"], &["LEGO"]),
    delivery("drinks", "Honeydew Melon Oolong", &["large-cup", "less-sugar"], &["SCHAGEE"]),
    delivery("drinks", "latte", &["large-cup"], &["Starbucks"]),
    delivery("drinks", "milk tea", &["less-sugar"], &["HEYTEA"]),
    delivery("food-delivery", "beef noodles", &["spicy"], &[]),
    delivery("food-delivery", "fried chicken", &["spicy"], &["Wallace"]),
    delivery("food-delivery", "stir-fried pork rice", &["spicy"], &["Laoxiang Chicken"]),
    delivery("food-delivery", "salad bowl", &[], &[]),
];

/// OTA room types; titles are `<view> <room>` and carry no native metadata.
pub const ROOM_TYPES: &[&str] = &[
    "Luxury Suite",
    "Twin Room",
    "King Room",
    "Family Room",
];
pub const ROOM_VIEWS: &[&str] = &["Ocean View", "Garden View", "City View", "Lake View"];
pub const HOTEL_TIERS: &[&str] = &["Budget Hotel", "Boutique Hotel", "Business Hotel", "Resort"];
pub const DESTINATIONS: &[&str] = &[
    "Hailing Island Guangdong Province",
    "Sanya Hainan Province",
    "West Lake Hangzhou",
    "Lijiang Yunnan Province",
    "Qingdao Shandong Province",
    "Chengdu Sichuan Province",
];
pub const ATTRACTIONS: &[&str] = &[
    "Happy Valley Day Pass",
    "Ocean Park Ticket",
    "Ancient Town Pass",
    "Panda Base Ticket",
];

/// POI kinds with their leaf category and display suffix.
pub const POI_KINDS: &[(&str, &str, &str)] = &[
    ("park", "outdoor-venue", "Park"),
    ("mall", "shopping-venue", "Mall"),
    ("restaurant", "dining-venue", "Bistro"),
    ("gym", "fitness-venue", "Fitness Club"),
    ("museum", "culture-venue", "Museum"),
    ("playground", "family-venue", "Kids Playground"),
];
pub const POI_PREFIXES: &[&str] = &["Riverside", "Sunshine", "Maple", "Harbor", "Central"];

/// Leaf category → taxonomy group used for salience counting.
pub const TAXONOMY: &[(&str, &str)] = &[
    ("apparel", "Fashion & Apparel"),
    ("beauty", "Beauty & Care"),
    ("electronics", "Consumer Electronics"),
    ("groceries", "Food & Grocery"),
    ("home", "Home & Living"),
    ("books-study", "Books & Study"),
    ("outdoor-sports", "Outdoor Sports"),
    ("pets", "Pets"),
    ("health", "Health"),
    ("baby-care", "Parenting & Baby"),
    ("baby-formula", "Parenting & Baby"),
    ("maternity", "Parenting & Baby"),
    ("kids-education", "Parenting & Baby"),
    ("family-venue", "Parenting & Baby"),
    ("drinks", "Dining"),
    ("food-delivery", "Dining"),
    ("dining-venue", "Dining"),
    ("hotel", "Travel"),
    ("attraction-ticket", "Travel"),
    ("outdoor-venue", "Outdoor Sports"),
    ("fitness-venue", "Outdoor Sports"),
    ("shopping-venue", "Shopping"),
    ("culture-venue", "Culture"),
];

/// Marketing noise used to dirty e-commerce titles.
pub mod noise {
    pub const SEASONS: &[&str] = &[
        "autumn & winter",
        "spring & summer",
        "autumn",
        "winter",
        "summer",
    ];
    pub const FRESHNESS: &[&str] = &["new", "new arrival", "latest"];
    /// Audience bait on products that are not audience-specific.
    pub const BAIT: &[&str] = &[
        "for pregnant women",
        "for adults, women and students",
        "for the whole family",
        "for students",
        "for office workers",
        "suitable for elderly and children",
    ];
    pub const FLUFF: &[&str] = &[
        "gentle style",
        "korean style",
        "ins style",
        "versatile",
        "hot sale",
        "free shipping",
        "limited offer",
        "official flagship store",
        "genuine guarantee",
        "nutritious and healthy",
        "gift box",
    ];
    pub const FILLER: &[&str] = &[
        "pullover sweater",
        "base layer",
        "everyday essential",
        "daily use",
        "home and travel",
        "all seasons",
    ];
    pub const PACKS: &[&str] = &[
        "400g × 3 bags",
        "80 sheets × 10 packs",
        "family pack",
        "2 pieces",
        "value bundle",
        "1kg × 2",
    ];
}
