# X spawns two children with probability 0.3
init X
X -> X X : 0.3
X -> : 0.7
