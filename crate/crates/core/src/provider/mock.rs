//! Deterministic offline stand-in for a chat model.
//!
//! The response is a pure function of the request. Ranking requests reward
//! longer prompts: with probability `min(0.9, 0.3 + words / 1000)` the
//! candidates sharing a category with the session are moved ahead, which
//! gives the optimizers a real landscape to climb without network access.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{split_task, whitespace_tokens, ChatRequest, ChatResponse, ProviderError, Task, TextGenerator};
use crate::seed::{derive_seed, stable_hash, unit_interval};
use crate::text::{normalize_whitespace, split_sentences, truncate_to_sentences};
use crate::wire;

/// Bidirectional word substitutions used for mutation and paraphrase.
pub const SYNONYMS: &[(&str, &str)] = &[
    ("identify", "recognize"),
    ("infer", "deduce"),
    ("select", "choose"),
    ("analyze", "examine"),
    ("determine", "establish"),
    ("relevant", "pertinent"),
    ("combinations", "groupings"),
    ("intent", "intention"),
    ("user", "customer"),
    ("items", "products"),
    ("reorder", "rearrange"),
    ("preferences", "tastes"),
    ("patterns", "regularities"),
    ("meaningful", "significant"),
    ("capture", "record"),
    ("likelihood", "probability"),
    ("ensure", "guarantee"),
    ("interactions", "engagements"),
    ("behavior", "conduct"),
    ("carefully", "thoroughly"),
];

const GENERIC_PROMPTS: &[&str] = &[
    "Rank the candidate items for the user based on the session.",
    "Given the session, reorder the candidate set and output the item indices.",
    "Look at the items the user viewed and sort the candidates by relevance.",
    "Recommend items from the candidate set that fit the session.",
];

const MAX_CHARS: usize = 4000;

#[derive(Debug, Clone)]
pub struct MockProvider {
    parallelism: usize,
}

impl Default for MockProvider {
    fn default() -> Self {
        Self { parallelism: 4 }
    }
}

impl MockProvider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_parallelism(parallelism: usize) -> Self {
        Self { parallelism: parallelism.max(1) }
    }
}

impl TextGenerator for MockProvider {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let text = mock_rules(req)?;
        Ok(ChatResponse {
            prompt_tokens: whitespace_tokens(&req.system_text) + whitespace_tokens(&req.user_text),
            completion_tokens: whitespace_tokens(&text),
            latency_ms: 0,
            text,
        })
    }

    fn parallelism(&self) -> usize {
        self.parallelism
    }
}

/// The mock's response text for a request.
pub fn mock_rules(req: &ChatRequest) -> Result<String, ProviderError> {
    let (task, body) = split_task(&req.user_text)?;
    match task {
        Task::Init => Ok(wrap(&init_variant(body, req.request_seed))),
        Task::Vary => {
            let parents = labelled_prompts(body);
            if parents.is_empty() {
                return Err(ProviderError::Protocol("variation request names no parent prompts".into()));
            }
            Ok(wrap(&vary(&parents, req.request_seed)))
        }
        Task::Rank => rank(body, req.request_seed),
    }
}

fn wrap(prompt: &str) -> String {
    format!("Here is the new prompt:\n{}{prompt}{}", wire::START, wire::END)
}

fn synonym(word: &str) -> Option<&'static str> {
    SYNONYMS.iter().find_map(|&(a, b)| {
        if a == word {
            Some(b)
        } else if b == word {
            Some(a)
        } else {
            None
        }
    })
}

/// Splits a token into (leading punctuation, core word, trailing punctuation).
fn token_parts(token: &str) -> (&str, &str, &str) {
    let is_word = |c: char| c.is_alphanumeric() || c == '-';
    let start = token.find(is_word).unwrap_or(token.len());
    let end = token.rfind(is_word).map_or(start, |i| i + token[i..].chars().next().unwrap().len_utf8());
    (&token[..start], &token[start..end], &token[end..])
}

fn substitute_token(token: &str) -> Option<String> {
    let (pre, core, post) = token_parts(token);
    let rep = synonym(&core.to_lowercase())?;
    let capitalized = core.chars().next().is_some_and(char::is_uppercase);
    let rep = if capitalized {
        let mut c = rep.chars();
        c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
    } else {
        rep.to_string()
    };
    Some(format!("{pre}{rep}{post}"))
}

/// Replaces exactly one substitutable word, chosen by `rng`. Text without any
/// substitutable word is returned unchanged.
fn mutate_one_word(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut tokens: Vec<String> = text.split(' ').map(str::to_string).collect();
    let eligible: Vec<usize> = (0..tokens.len()).filter(|&i| substitute_token(&tokens[i]).is_some()).collect();
    if let Some(&i) = eligible.choose(rng) {
        tokens[i] = substitute_token(&tokens[i]).expect("eligible token");
    }
    tokens.join(" ")
}

fn init_variant(body: &str, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 0x1417]));
    let example = body
        .lines()
        .find_map(|l| l.trim_start().strip_prefix(wire::EXAMPLE_LABEL))
        .map(normalize_whitespace)
        .filter(|e| !e.is_empty())
        .unwrap_or_else(|| GENERIC_PROMPTS[rng.gen_range(0..GENERIC_PROMPTS.len())].to_string());
    let mut sentences = split_sentences(&example);
    sentences.shuffle(&mut rng);
    let paraphrased: Vec<String> = sentences
        .join(" ")
        .split(' ')
        .map(|tok| match substitute_token(tok) {
            Some(rep) if rng.gen_bool(0.5) => rep,
            _ => tok.to_string(),
        })
        .collect();
    truncate_to_sentences(&paraphrased.join(" "), MAX_CHARS)
}

/// Extracts texts following `Prompt <k>:` labels, in order.
fn labelled_prompts(body: &str) -> Vec<String> {
    body.lines()
        .filter_map(|l| {
            let rest = l.trim_start().strip_prefix(wire::PARENT_LABEL)?;
            let (num, text) = rest.split_once(':')?;
            num.trim().parse::<usize>().ok()?;
            let text = normalize_whitespace(text);
            (!text.is_empty()).then_some(text)
        })
        .collect()
}

/// Sentence-level crossover over all parents followed by one word mutation.
fn vary(parents: &[String], seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 0x7a11]));
    let split: Vec<Vec<String>> = parents.iter().map(|p| split_sentences(p)).collect();
    let longest = split.iter().map(Vec::len).max().unwrap_or(0);
    let mut child: Vec<String> = Vec::new();
    for pos in 0..longest {
        let holders: Vec<usize> = (0..split.len()).filter(|&k| pos < split[k].len()).collect();
        let pick = holders[rng.gen_range(0..holders.len())];
        let sentence = split[pick][pos].clone();
        // occasionally keep a second parent's sentence at this position too
        let extra = if holders.len() > 1 && rng.gen_bool(0.2) {
            let other = holders[rng.gen_range(0..holders.len())];
            Some(split[other][pos].clone()).filter(|s| *s != sentence)
        } else {
            None
        };
        if holders.len() < split.len() && !rng.gen_bool(0.5) && pos >= 1 {
            // positions past the shorter parents are kept with probability 1/2
            continue;
        }
        child.push(sentence);
        child.extend(extra);
    }
    if child.is_empty() {
        child = split[0].clone();
    }
    let crossed = truncate_to_sentences(&child.join(" "), MAX_CHARS);
    mutate_one_word(&crossed, &mut rng)
}

struct Candidate<'a> {
    index: usize,
    line: &'a str,
    title: &'a str,
    categories: BTreeSet<&'a str>,
}

fn parse_categories(desc: &str) -> (&str, BTreeSet<&str>) {
    match desc.split_once(wire::CATEGORY_SEPARATOR) {
        Some((title, cats)) => (title.trim(), cats.split(", ").map(str::trim).filter(|c| !c.is_empty()).collect()),
        None => (desc.trim(), BTreeSet::new()),
    }
}

fn rank(body: &str, seed: u64) -> Result<String, ProviderError> {
    let mut genome_lines = Vec::new();
    let mut session_lines: Vec<&str> = Vec::new();
    let mut candidates: Vec<Candidate> = Vec::new();
    #[derive(PartialEq)]
    enum Block {
        Genome,
        Session,
        Candidates,
    }
    let mut block = Block::Genome;
    for line in body.lines() {
        let trimmed = line.trim();
        if trimmed == wire::SESSION_HEADER {
            block = Block::Session;
            continue;
        }
        if trimmed == wire::CANDIDATES_HEADER {
            block = Block::Candidates;
            continue;
        }
        match block {
            Block::Genome => genome_lines.push(line),
            Block::Session => {
                if let Some(item) = trimmed.strip_prefix("- ") {
                    session_lines.push(item);
                }
            }
            Block::Candidates => {
                let Some(rest) = trimmed.strip_prefix('[') else { continue };
                let Some((num, desc)) = rest.split_once(']') else { continue };
                let Ok(index) = num.parse::<usize>() else { continue };
                let (title, categories) = parse_categories(desc);
                candidates.push(Candidate { index, line: trimmed, title, categories });
            }
        }
    }
    if candidates.is_empty() {
        return Err(ProviderError::Protocol("ranking request lists no candidates".into()));
    }
    let genome = genome_lines.join("\n");
    let genome = genome.trim();
    let session_key = session_lines.join("\u{1f}");
    let session_categories: BTreeSet<&str> = session_lines.iter().flat_map(|l| parse_categories(l).1).collect();

    let words = genome.split_whitespace().count() as f64;
    let p_signal = (0.3 + 0.01 * words / 10.0).min(0.9);
    let draw = unit_interval(derive_seed(&[seed, stable_hash(genome.as_bytes())]));
    let signal = draw < p_signal;

    let key = |c: &Candidate| {
        let mut bytes = Vec::with_capacity(genome.len() + c.line.len() + session_key.len() + 2);
        bytes.extend_from_slice(genome.as_bytes());
        bytes.push(0x1e);
        bytes.extend_from_slice(c.line.as_bytes());
        bytes.push(0x1e);
        bytes.extend_from_slice(session_key.as_bytes());
        stable_hash(&bytes)
    };
    candidates.sort_by_cached_key(|c| {
        let overlaps = !c.categories.is_disjoint(&session_categories);
        (signal && !overlaps, key(c), c.index)
    });
    let mut out = String::from("Ranked candidates:\n");
    for c in &candidates {
        out.push_str(&format!("[{}] {}\n", c.index, c.title));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(user: String, seed: u64) -> ChatRequest {
        ChatRequest { system_text: String::new(), user_text: user, temperature: 0.7, max_tokens: 256, request_seed: seed }
    }

    fn rank_request(genome: &str, n: usize, seed: u64) -> ChatRequest {
        let mut body = format!("{TASK}\n{genome}\nSession:\n- Alpha | categories: a\n- Beta | categories: b\nCandidates:\n", TASK = crate::provider::TASK_RANK);
        for i in 1..=n {
            let cat = if i % 3 == 0 { "a" } else { "z" };
            body.push_str(&format!("[{i}] Item {i} | categories: {cat}\n"));
        }
        req(body, seed)
    }

    #[test]
    fn rank_is_a_permutation() {
        let text = mock_rules(&rank_request("Rank things well.", 20, 9)).unwrap();
        let ids: Vec<usize> = text
            .lines()
            .filter_map(|l| l.strip_prefix('[')?.split_once(']')?.0.parse().ok())
            .collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..=20).collect::<Vec<_>>());
    }

    #[test]
    fn replay_is_byte_identical() {
        let r = rank_request("Some prompt text.", 20, 77);
        assert_eq!(MockProvider::new().complete(&r).unwrap(), MockProvider::new().complete(&r).unwrap());
    }

    #[test]
    fn seeds_change_output() {
        let outs: BTreeSet<String> = (0..1000u64)
            .map(|s| mock_rules(&req(format!("{}\nExample prompt: Identify the user intent. Select the relevant items. Reorder the candidates carefully. Analyze patterns.", crate::provider::TASK_INIT), s)).unwrap())
            .collect();
        // 4 sentences x up to 6 substitutions leaves 24 * 64 outcomes
        assert!(outs.len() > 500, "only {} distinct outputs", outs.len());
    }

    #[test]
    fn unknown_marker_is_protocol_error() {
        assert!(matches!(mock_rules(&req("hello".into(), 0)), Err(ProviderError::Protocol(_))));
    }

    #[test]
    fn signal_moves_overlapping_items_forward() {
        // a long prompt saturates p_signal at 0.9: most seeds put the
        // category-"a" items (indices divisible by 3) first
        let long = "word ".repeat(700);
        let mut front_hits = 0;
        for seed in 0..200 {
            let text = mock_rules(&rank_request(&long, 20, seed)).unwrap();
            let first: Vec<usize> = text
                .lines()
                .filter_map(|l| l.strip_prefix('[')?.split_once(']')?.0.parse().ok())
                .take(6)
                .collect();
            if first.iter().all(|i| i % 3 == 0) {
                front_hits += 1;
            }
        }
        assert!(front_hits > 150, "{front_hits}");
    }

    #[test]
    fn token_parts_split_punctuation() {
        assert_eq!(token_parts("(user,"), ("(", "user", ","));
        assert_eq!(substitute_token("Identify,").as_deref(), Some("Recognize,"));
        assert_eq!(substitute_token("zebra"), None);
    }
}
