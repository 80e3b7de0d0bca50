use std::io::{BufRead, Write};
use std::sync::Arc;

use anyhow::Result;
use conscience::engine::object_tree_snapshot;
use conscience::{Env, EnvConfig, WorldModel};

/// Interactive session: reads commands from `input`, writes observations and
/// a debug banner (reward and annotations) to `output`.
pub fn play<R: BufRead, W: Write>(
    world: Arc<WorldModel>,
    config: EnvConfig,
    input: R,
    mut output: W,
) -> Result<()> {
    let (first, mut env) = Env::reset_with(world, config)?;
    writeln!(output, "{first}")?;
    let mut lines = input.lines();
    loop {
        if env.is_done() {
            writeln!(output, "[episode over: {:?}, score {}]", env.log().done_reason.expect("done"), env.score())?;
            return Ok(());
        }
        write!(output, "> ")?;
        output.flush()?;
        let Some(line) = lines.next() else {
            writeln!(output)?;
            return Ok(());
        };
        let line = line?;
        let cmd = line.trim();
        match cmd {
            "" => continue,
            ":quit" | ":q" => return Ok(()),
            ":score" => writeln!(output, "{}", env.score())?,
            ":tree" => write!(output, "{}", object_tree_snapshot(env.state(), env.world()).to_text())?,
            ":valid" => {
                for a in env.valid_actions() {
                    writeln!(output, "{a}")?;
                }
            }
            ":help" => writeln!(output, "meta-commands: :score :tree :valid :quit")?,
            _ if cmd.starts_with(':') => writeln!(output, "unknown meta-command {cmd} (try :help)")?,
            _ => {
                let step = env.step(cmd)?;
                writeln!(output, "{}", step.observation)?;
                let mut banner = format!("[reward {:+} | score {}/{}", step.reward, step.score, env.world().max_score);
                for a in &step.annotations {
                    banner.push_str(&format!(
                        " | {} {}{}",
                        a.source_rule,
                        a.degrees,
                        if a.attempt { " attempt" } else { "" }
                    ));
                }
                banner.push(']');
                writeln!(output, "{banner}")?;
            }
        }
    }
}
