//! Brute-force reference implementations used to check the library.
//! Nothing here calls into the code paths it checks.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use helpa_core::sim_env::{ElementSpec, EnvSpec, Gesture, TERMINAL};

/// `(len, action, start, end)`, 1-based inclusive spans.
pub type Cand = (usize, usize, usize, usize);

/// Every (action, span) whose words equal the action's parameter words,
/// sorted longest first, then by action, then by start.
pub fn oracle_candidates(command: &[&str], params: &[Option<Vec<&str>>]) -> Vec<Cand> {
    let mut out = Vec::new();
    for (i, p) in params.iter().enumerate() {
        let Some(p) = p else { continue };
        if p.is_empty() {
            continue;
        }
        for m in 1..=command.len() {
            for n in m..=command.len() {
                if command[m - 1..n] == p[..] {
                    out.push((n - m + 1, i + 1, m, n));
                }
            }
        }
    }
    out.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    out
}

/// Literal reservation-array simulation: a candidate is accepted when its
/// span is all zeros, or when some d fills the whole span and neither
/// neighbour (out of range reads 0) holds d. Returns `(start, end, action)`
/// stably sorted by start.
pub fn oracle_reserve(cands: &[Cand], command_len: usize, action_count: usize) -> Vec<(usize, usize, usize)> {
    let mut r: HashMap<usize, usize> = HashMap::new();
    let read = |r: &HashMap<usize, usize>, k: usize| -> usize {
        if k == 0 || k > command_len {
            0
        } else {
            *r.get(&k).unwrap_or(&0)
        }
    };
    let mut l2 = Vec::new();
    for &(_, i, m, n) in cands {
        let all_zero = (m..=n).all(|k| read(&r, k) == 0);
        let exact = (0..=action_count)
            .any(|d| (m..=n).all(|k| read(&r, k) == d) && read(&r, m - 1) != d && read(&r, n + 1) != d);
        if all_zero || exact {
            for k in m..=n {
                r.insert(k, i);
            }
            l2.push((m, n, i));
        }
    }
    l2.sort_by_key(|&(m, _, _)| m);
    l2
}

/// Template items: `Some(word)` for constants, `None` for variables.
pub type Item<'a> = Option<&'a str>;

/// All splits of `command` into `items.len()` non-empty contiguous pieces
/// consistent with the constants, as the list of variable captures, in
/// lexicographic order of capture lengths.
pub fn oracle_unify<'a>(items: &[Item<'_>], command: &[&'a str]) -> Vec<Vec<Vec<&'a str>>> {
    let k = items.len();
    let n = command.len();
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    // choose k-1 cut points among 1..n
    let mut cuts: Vec<usize> = (1..k).collect();
    loop {
        let mut bounds = vec![0];
        bounds.extend(&cuts);
        bounds.push(n);
        let pieces: Vec<&[&str]> = bounds.windows(2).map(|w| &command[w[0]..w[1]]).collect();
        let ok = items.iter().zip(&pieces).all(|(item, piece)| match item {
            Some(c) => piece.len() == 1 && piece[0] == *c,
            None => true,
        });
        if ok {
            out.push(
                items
                    .iter()
                    .zip(&pieces)
                    .filter(|(item, _)| item.is_none())
                    .map(|(_, p)| p.to_vec())
                    .collect(),
            );
        }
        // next combination
        let mut idx = cuts.len();
        loop {
            if idx == 0 {
                out.sort_by(|a: &Vec<Vec<&str>>, b| {
                    let la: Vec<usize> = a.iter().map(Vec::len).collect();
                    let lb: Vec<usize> = b.iter().map(Vec::len).collect();
                    la.cmp(&lb)
                });
                return out;
            }
            idx -= 1;
            let max = n - (cuts.len() - idx);
            if cuts[idx] < max {
                cuts[idx] += 1;
                for j in idx + 1..cuts.len() {
                    cuts[j] = cuts[j - 1] + 1;
                }
                break;
            }
        }
        if cuts.is_empty() {
            return out;
        }
    }
}

/// Plain Levenshtein over tokens where `None` matches any token.
fn lev(a: &[Item<'_>], b: &[&str]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let same = match a[i - 1] {
                None => true,
                Some(c) => c == b[j - 1],
            };
            d[i][j] = (d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1)
                .min(d[i - 1][j - 1] + usize::from(!same));
        }
    }
    d[a.len()][b.len()]
}

/// Template distance by enumeration: every variable is expanded into k
/// single-token wildcards (k = 0 means dropped, cost 1), then plain
/// Levenshtein; the minimum over all expansions.
pub fn oracle_distance(items: &[Item<'_>], command: &[&str]) -> usize {
    let vars = items.iter().filter(|i| i.is_none()).count();
    let maxk = command.len();
    let mut best = usize::MAX;
    let mut ks = vec![0usize; vars];
    loop {
        let mut expanded = Vec::new();
        let mut dropped = 0;
        let mut v = 0;
        for item in items {
            match item {
                Some(c) => expanded.push(Some(*c)),
                None => {
                    if ks[v] == 0 {
                        dropped += 1;
                    }
                    expanded.extend(std::iter::repeat_n(None, ks[v]));
                    v += 1;
                }
            }
        }
        best = best.min(lev(&expanded, command) + dropped);
        // odometer
        let mut p = 0;
        loop {
            if p == vars {
                return best;
            }
            if ks[p] < maxk {
                ks[p] += 1;
                break;
            }
            ks[p] = 0;
            p += 1;
        }
    }
}

/// Direct gesture-level simulation of a session: element state keyed
/// `page/element`, pages reset to their defaults when loaded.
pub fn simulate_session(env: &EnvSpec, session: &[Gesture]) -> BTreeMap<String, String> {
    let mut state = BTreeMap::new();
    let mut page: Option<usize> = None;
    let load = |state: &mut BTreeMap<String, String>, p: usize| {
        for e in &env.pages[p].elements {
            let (id, v) = match e {
                ElementSpec::Textbox { id, default } | ElementSpec::Menu { id, default, .. } => {
                    (id, default.clone().unwrap_or_default())
                }
                ElementSpec::Checkbox { id, default } | ElementSpec::Radio { id, default, .. } => {
                    (id, if *default { "true".into() } else { "false".into() })
                }
                ElementSpec::Button { .. } => continue,
            };
            state.insert(format!("{}/{}", env.pages[p].id, id), v);
        }
    };
    for g in session {
        let here = page.map(|p| env.pages[p].id.clone()).unwrap_or_default();
        match g {
            Gesture::Navigate { url } => {
                let p = if *url == env.start_url {
                    0
                } else {
                    env.pages
                        .iter()
                        .position(|p| p.url.as_deref() == Some(url))
                        .expect("known url")
                };
                load(&mut state, p);
                page = Some(p);
            }
            Gesture::Type { element, text } => {
                state.insert(format!("{here}/{element}"), text.clone());
            }
            Gesture::Select { element, option } => {
                state.insert(format!("{here}/{element}"), option.clone());
            }
            Gesture::Check { element } => {
                let k = format!("{here}/{element}");
                let on = state.get(&k).map(|v| v == "true").unwrap_or(false);
                state.insert(k, if on { "false".into() } else { "true".into() });
            }
            Gesture::Radio { element } => {
                let p = &env.pages[page.expect("page loaded")];
                let group = p.elements.iter().find_map(|e| match e {
                    ElementSpec::Radio { id, group, .. } if id == element => Some(group.clone()),
                    _ => None,
                });
                for e in &p.elements {
                    if let ElementSpec::Radio { id, group: g, .. } = e {
                        if Some(g) == group.as_ref() {
                            state.insert(format!("{here}/{id}"), (id == element).to_string());
                        }
                    }
                }
            }
            Gesture::Click { element } => {
                let p = &env.pages[page.expect("page loaded")];
                let goto = p.elements.iter().find_map(|e| match e {
                    ElementSpec::Button { id, goto } if id == element => Some(goto.clone()),
                    _ => None,
                });
                match goto.flatten() {
                    Some(t) if t == TERMINAL => page = None,
                    Some(t) => {
                        let next = env.pages.iter().position(|p| p.id == t).expect("known page");
                        load(&mut state, next);
                        page = Some(next);
                    }
                    None => {}
                }
            }
        }
    }
    state
}

/// Splits on whitespace; the oracle's view of a command.
pub fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}
