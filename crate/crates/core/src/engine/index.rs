/// Set of small integer ids with O(1) insert, remove, membership and
/// uniform sampling. Removal swaps the last member into the hole, so the
/// member order depends on the operation history (deterministically).
#[derive(Debug, Clone, Default)]
pub struct IndexSet {
    members: Vec<u32>,
    slot: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl IndexSet {
    pub fn with_universe(n: usize) -> Self {
        Self {
            members: Vec::new(),
            slot: vec![ABSENT; n],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, id: u32) -> bool {
        self.slot[id as usize] != ABSENT
    }

    /// Returns false if `id` was already present.
    #[inline]
    pub fn insert(&mut self, id: u32) -> bool {
        if self.contains(id) {
            return false;
        }
        self.slot[id as usize] = self.members.len() as u32;
        self.members.push(id);
        true
    }

    /// Returns false if `id` was absent.
    #[inline]
    pub fn remove(&mut self, id: u32) -> bool {
        let s = self.slot[id as usize];
        if s == ABSENT {
            return false;
        }
        let last = self.members.pop().expect("non-empty");
        if last != id {
            self.members[s as usize] = last;
            self.slot[last as usize] = s;
        }
        self.slot[id as usize] = ABSENT;
        true
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.members[i]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.members
    }

    pub fn universe(&self) -> usize {
        self.slot.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    proptest! {
        #[test]
        fn mirrors_a_btreeset(ops in proptest::collection::vec((any::<bool>(), 0u32..32), 0..200)) {
            let mut set = IndexSet::with_universe(32);
            let mut model = BTreeSet::new();
            for (ins, id) in ops {
                if ins {
                    prop_assert_eq!(set.insert(id), model.insert(id));
                } else {
                    prop_assert_eq!(set.remove(id), model.remove(&id));
                }
                prop_assert_eq!(set.len(), model.len());
                let got: BTreeSet<u32> = set.as_slice().iter().copied().collect();
                prop_assert_eq!(&got, &model);
                for id in 0..32 {
                    prop_assert_eq!(set.contains(id), model.contains(&id));
                }
            }
        }
    }
}
