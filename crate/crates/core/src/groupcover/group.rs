use crate::error::{Error, Result};

/// A finite group given by its multiplication table, `table[g][h] = gh`.
/// Element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    pub name: String,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Checks closure, identity at 0, inverses and associativity.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let name = name.into();
        let n = table.len();
        let bad = |m: String| Err(Error::InvalidTables(format!("group {name}: {m}")));
        if n == 0 {
            return bad("empty table".into());
        }
        if let Some(g) = (0..n).find(|&g| table[g].len() != n || table[g].iter().any(|&x| x >= n)) {
            return bad(format!("row {g} is not a row of elements 0..{n}"));
        }
        if let Some(g) = (0..n).find(|&g| table[0][g] != g || table[g][0] != g) {
            return bad(format!("element 0 is not an identity (fails on {g})"));
        }
        let mut inverse = vec![0; n];
        for g in 0..n {
            match (0..n).find(|&h| table[g][h] == 0 && table[h][g] == 0) {
                Some(h) => inverse[g] = h,
                None => return bad(format!("element {g} has no inverse")),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("associativity fails on ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            name,
            table,
            inverse,
        })
    }

    pub fn trivial() -> Self {
        Self::from_table("1", vec![vec![0]]).expect("trivial table")
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(format!("Z{n}"), table).expect("cyclic table")
    }

    /// Permutations of three letters, in lexicographic order of their images.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index = |p: [usize; 3]| perms.iter().position(|&x| x == p).unwrap();
        // (p q)(i) = p(q(i))
        let table = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| index([p[q[0]], p[q[1]], p[q[2]]]))
                    .collect()
            })
            .collect();
        Self::from_table("S3", table).expect("S3 table")
    }

    /// Direct product; `(a, b)` is element `a * |H| + b`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let m = h.order();
        let n = g.order() * m;
        let table = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| g.mul(x / m, y / m) * m + h.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        Self::from_table(format!("{}x{}", g.name, h.name), table).expect("product table")
    }

    pub fn klein4() -> Self {
        Self::product(&Self::cyclic(2), &Self::cyclic(2))
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Conjugacy classes, each sorted, ordered by least element (identity first).
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for x in 0..n {
            if seen[x] {
                continue;
            }
            let mut class: Vec<usize> = (0..n)
                .map(|g| self.mul(self.mul(g, x), self.inv(g)))
                .collect();
            class.sort_unstable();
            class.dedup();
            for &y in &class {
                seen[y] = true;
            }
            out.push(class);
        }
        out
    }
}

/// A group acting on the points `0..points`; `table[g][x] = g x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    pub group: FiniteGroup,
    pub points: usize,
    table: Vec<Vec<usize>>,
}

impl GroupAction {
    pub fn new(group: FiniteGroup, points: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidTables(format!("action of {}: {m}", group.name)));
        if points == 0 {
            return bad("empty set".into());
        }
        if table.len() != group.order()
            || table.iter().any(|r| r.len() != points || r.iter().any(|&x| x >= points))
        {
            return bad(format!("table is not {} x {points}", group.order()));
        }
        if (0..points).any(|x| table[0][x] != x) {
            return bad("identity does not act trivially".into());
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                if let Some(x) = (0..points).find(|&x| table[g][table[h][x]] != table[group.mul(g, h)][x]) {
                    return bad(format!("g(hx) != (gh)x for g = {g}, h = {h}, x = {x}"));
                }
            }
        }
        Ok(GroupAction {
            group,
            points,
            table,
        })
    }

    /// Left multiplication on the group itself.
    pub fn regular(group: FiniteGroup) -> Self {
        let table = group.table().to_vec();
        let n = group.order();
        Self::new(group, n, table).expect("regular action")
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.table[g][x]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Orbit ids of `G` on `X × X` under the diagonal action, indexed by
    /// `x * points + y`; ids are numbered by least member.
    pub fn pair_orbits(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.points;
        let mut id = vec![usize::MAX; n * n];
        let mut sizes = Vec::new();
        for p in 0..n * n {
            if id[p] != usize::MAX {
                continue;
            }
            let k = sizes.len();
            let mut size = 0;
            for g in 0..self.group.order() {
                let q = self.act(g, p / n) * n + self.act(g, p % n);
                if id[q] == usize::MAX {
                    id[q] = k;
                    size += 1;
                }
            }
            sizes.push(size);
        }
        (id, sizes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_groups_validate() {
        assert_eq!(FiniteGroup::trivial().order(), 1);
        assert_eq!(FiniteGroup::cyclic(3).conjugacy_classes().len(), 3);
        let s3 = FiniteGroup::symmetric3();
        assert_eq!(s3.conjugacy_classes(), vec![vec![0], vec![1, 2, 5], vec![3, 4]]);
        assert_eq!(FiniteGroup::klein4().conjugacy_classes().len(), 4);
    }

    #[test]
    fn bad_tables_rejected() {
        assert!(FiniteGroup::from_table("x", vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table("x", vec![vec![1, 0], vec![0, 1]]).is_err());
        // a non-associative loop of order 5
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::from_table("loop", t).is_err());
        let z2 = FiniteGroup::cyclic(2);
        assert!(GroupAction::new(z2, 2, vec![vec![0, 1], vec![0, 0]]).is_err());
    }

    #[test]
    fn regular_pair_orbits() {
        let a = GroupAction::regular(FiniteGroup::cyclic(2));
        let (id, sizes) = a.pair_orbits();
        assert_eq!(id, vec![0, 1, 1, 0]);
        assert_eq!(sizes, vec![2, 2]);
        let s3 = GroupAction::regular(FiniteGroup::symmetric3());
        assert_eq!(s3.pair_orbits().1, vec![6; 6]);
    }
}
