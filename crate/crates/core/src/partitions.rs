//! Enumeration of ordered partitions of the type set into a fixed number of
//! non-empty blocks.
//!
//! Partitions are produced in increasing order of their block-assignment code
//! `sum_t block(t) * k^t`, so output order is reproducible.

use crate::model::OrderedPartition;

/// Iterator over all ordered partitions of `m` types into `k` non-empty blocks.
pub struct OrderedPartitions {
    m: usize,
    k: usize,
    code: u64,
    end: u64,
}

impl Iterator for OrderedPartitions {
    type Item = OrderedPartition;

    fn next(&mut self) -> Option<OrderedPartition> {
        while self.code < self.end {
            let mut c = self.code;
            self.code += 1;
            let mut assignment = Vec::with_capacity(self.m);
            let mut used = 0u64;
            for _ in 0..self.m {
                let block = (c % self.k as u64) as usize;
                c /= self.k as u64;
                used |= 1 << block;
                assignment.push(block);
            }
            if used.count_ones() as usize == self.k {
                return Some(
                    OrderedPartition::from_assignment(&assignment, self.k)
                        .expect("surjective assignment is a partition"),
                );
            }
        }
        None
    }
}

pub fn ordered_partitions(m: usize, k: usize) -> OrderedPartitions {
    assert!((1..=64).contains(&k), "block count out of range");
    let end = (k as u64)
        .checked_pow(m as u32)
        .expect("too many types to enumerate partitions");
    OrderedPartitions {
        m,
        k,
        code: 0,
        end: if k > m { 0 } else { end },
    }
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..m).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..m).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..m).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}
