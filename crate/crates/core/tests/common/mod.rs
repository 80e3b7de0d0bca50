#![allow(dead_code)]

use std::sync::Arc;

use conscience::engine::parse_script;
use conscience::WorldModel;

/// A three-room shop with a theft rule, two coins and a winning action.
pub const SHOP: &str = r#"
GAME shop
MAXSCORE 5
ROOM street "Street" "A quiet street. A shop lies north."
ROOM shop "Shop" "A cramped shop full of trinkets."
ROOM attic "Attic" "A dusty attic above the shop."
EXIT street NORTH shop
EXIT shop SOUTH street
EXIT shop UP attic
EXIT attic DOWN shop
OBJECT lamp "brass lamp" LOC street
  FLAGS TAKEABLE
OBJECT coin "gold coin" LOC street
  FLAGS TAKEABLE
OBJECT knife "small knife" LOC attic
  FLAGS TAKEABLE
OBJECT penny "copper coin" LOC attic
  FLAGS TAKEABLE
OBJECT purse "leather purse" LOC shop
  FLAGS TAKEABLE
OBJECT clerk "sleepy clerk" LOC shop
VERB take get
VERB drop
VERB look
VERB inventory
VERB steal
VERB rub
RULE steal_purse ON "steal purse"
  REQUIRE HAS knife
  DO MOVE purse PLAYER
  DO PRINT "You slip the purse into your coat."
  DO SCORE 2
  ANNOTATE 2 0 0 0 "Stealing a purse."
RULE rub_lamp ON "rub lamp"
  REQUIRE HAS lamp
  DO PRINT "A genie grants your wish."
  DO SCORE 3
  DO WIN
WALKTHROUGH
take lamp
north
up
take knife
down
steal purse
rub lamp
END
"#;

pub fn shop() -> Arc<WorldModel> {
    Arc::new(parse_script(SHOP).expect("shop fixture compiles"))
}
