//! Word-major sparse topic counts: for each word id, the (topic, count)
//! pairs with a non-zero count. K is small (tens at most) while V can reach
//! 10^5, so a short list per word beats a dense K×V table for memory and
//! keeps the per-token lookup a linear scan over a handful of entries.

use serde::{Deserialize, Serialize};

pub type TopicId = u16;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordTopicCounts {
    rows: Vec<Vec<(TopicId, u32)>>,
}

impl WordTopicCounts {
    pub fn new(vocab_size: usize) -> Self {
        WordTopicCounts {
            rows: vec![Vec::new(); vocab_size],
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, word: u32, topic: TopicId) -> u32 {
        self.rows[word as usize]
            .iter()
            .find(|(t, _)| *t == topic)
            .map_or(0, |&(_, c)| c)
    }

    /// Non-zero `(topic, count)` entries for `word`, in no particular order.
    pub fn row(&self, word: u32) -> &[(TopicId, u32)] {
        &self.rows[word as usize]
    }

    pub fn increment(&mut self, word: u32, topic: TopicId) {
        let row = &mut self.rows[word as usize];
        match row.iter_mut().find(|(t, _)| *t == topic) {
            Some(entry) => entry.1 += 1,
            None => row.push((topic, 1)),
        }
    }

    /// Panics if the count is already zero.
    pub fn decrement(&mut self, word: u32, topic: TopicId) {
        let row = &mut self.rows[word as usize];
        let pos = row
            .iter()
            .position(|(t, _)| *t == topic)
            .unwrap_or_else(|| panic!("decrement of empty count (word {word}, topic {topic})"));
        row[pos].1 -= 1;
        if row[pos].1 == 0 {
            row.swap_remove(pos);
        }
    }

    /// `(topic, word, count)` triples sorted by topic then word.
    pub fn triples(&self) -> Vec<(TopicId, u32, u32)> {
        let mut out: Vec<_> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(w, row)| row.iter().map(move |&(t, c)| (t, w as u32, c)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Σ_w n_tw for each topic.
    pub fn topic_sums(&self, num_topics: usize) -> Vec<u64> {
        let mut sums = vec![0u64; num_topics];
        for row in &self.rows {
            for &(t, c) in row {
                sums[t as usize] += c as u64;
            }
        }
        sums
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_track_updates() {
        let mut c = WordTopicCounts::new(3);
        c.increment(1, 2);
        c.increment(1, 2);
        c.increment(1, 0);
        assert_eq!(c.get(1, 2), 2);
        c.decrement(1, 2);
        c.decrement(1, 2);
        assert_eq!(c.get(1, 2), 0);
        assert_eq!(c.row(1), &[(0, 1)]);
        assert_eq!(c.triples(), vec![(0, 1, 1)]);
        assert_eq!(c.topic_sums(3), vec![1, 0, 0]);
    }

    #[test]
    #[should_panic]
    fn decrement_below_zero_panics() {
        WordTopicCounts::new(1).decrement(0, 0);
    }
}
