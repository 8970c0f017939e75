# X spawns two children with probability 0.5
init X
X -> X X : 0.5
X -> : 0.5
